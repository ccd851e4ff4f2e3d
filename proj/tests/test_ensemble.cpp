#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "ispt/ensemble.hpp"

using namespace ispt;

namespace {

const GridDims k4x4{4, 4};

// Independent oracle: simulate every initial state with the per-cell step.
std::vector<TrajectoryWindow> brute_windows(GridDims dims, int t0, int length) {
    const LifeEngine engine(dims);
    std::vector<TrajectoryWindow> out;
    const std::uint32_t states = 1u << dims.cells();
    for (std::uint32_t s = 0; s < states; ++s) {
        BitState cur{s};
        for (int t = 1; t < t0; ++t) cur = engine.step_reference(cur);
        TrajectoryWindow w;
        w.start_time = t0;
        for (int i = 0; i < length; ++i) {
            w.slices.push_back(cur);
            cur = engine.step_reference(cur);
        }
        out.push_back(std::move(w));
    }
    return out;
}

SpatioTemporalPattern random_pattern(std::mt19937& rng, GridDims dims, int t0, int length) {
    SpatioTemporalPattern pat;
    pat.dims = dims;
    pat.start_time = t0;
    for (int i = 0; i < length; ++i) {
        SliceMask m;
        m.nodes = rng() & ((1u << dims.cells()) - 1);
        m.values = rng() & m.nodes;
        pat.slices.push_back(m);
    }
    return pat;
}

}  // namespace

TEST_CASE("one-cell grid, identity window") {
    const auto tab = build_ensemble(GridDims{1, 1}, 1, 1);
    CHECK(tab.total() == 2);
    CHECK(tab.entries().size() == 2);
    // A single cell dies of loneliness, so from t=2 only the dead window
    // remains.
    const auto tab2 = build_ensemble(GridDims{1, 1}, 2, 1);
    REQUIRE(tab2.entries().size() == 1);
    CHECK(tab2.entries()[0].multiplicity == 2);
    CHECK(tab2.unpack(tab2.entries()[0].key).slices == std::vector<BitState>{BitState{0}});
}

TEST_CASE("t0=1 L=1 tabulates the uniform initial distribution") {
    const auto tab = build_ensemble(GridDims{2, 3}, 1, 1);
    CHECK(tab.total() == 64);
    REQUIRE(tab.entries().size() == 64);
    for (const auto& e : tab.entries()) CHECK(e.multiplicity == 1);
}

TEST_CASE("multiplicities sum to the number of initial states") {
    const auto tab = build_ensemble(k4x4, 8, 3);
    std::uint64_t sum = 0;
    for (const auto& e : tab.entries()) sum += e.multiplicity;
    CHECK(sum == 65536);
    CHECK(tab.total() == 65536);
    // Entries are strictly sorted, so keys are distinct.
    for (std::size_t i = 1; i < tab.entries().size(); ++i)
        REQUIRE(tab.entries()[i - 1].key < tab.entries()[i].key);
}

TEST_CASE("parallel build equals the serial reference build") {
    const auto par = build_ensemble(k4x4, 8, 3, 4);
    const auto ser = build_ensemble_serial(k4x4, 8, 3);
    REQUIRE(par.entries().size() == ser.entries().size());
    for (std::size_t i = 0; i < par.entries().size(); ++i) {
        CHECK(par.entries()[i].key == ser.entries()[i].key);
        CHECK(par.entries()[i].multiplicity == ser.entries()[i].multiplicity);
    }
}

TEST_CASE("table matches per-state simulation on a small grid") {
    const GridDims dims{3, 4};
    const int t0 = 5, length = 3;
    const auto tab = build_ensemble(dims, t0, length);
    const auto brute = brute_windows(dims, t0, length);

    std::map<std::vector<BitState>, std::uint64_t> expected;
    for (const auto& w : brute) ++expected[w.slices];
    REQUIRE(tab.entries().size() == expected.size());
    for (const auto& e : tab.entries()) {
        const auto w = tab.unpack(e.key);
        CHECK(tab.pack(w) == e.key);
        CHECK(tab.multiplicity(w) == e.multiplicity);
        REQUIRE(expected.at(w.slices) == e.multiplicity);
    }
}

TEST_CASE("pattern_count matches a brute scan over all initial states") {
    const auto tab = build_ensemble(k4x4, 8, 3);
    const auto brute = brute_windows(k4x4, 8, 3);
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        auto pat = random_pattern(rng, k4x4, 8, 3);
        // Mix in sparse patterns, which actually occur.
        if (trial % 2) for (auto& m : pat.slices) { m.nodes &= 0x8421u; m.values &= m.nodes; }
        std::uint64_t expect = 0;
        for (const auto& w : brute) {
            bool ok = true;
            for (int i = 0; i < 3 && ok; ++i)
                ok = (w.slices[i].bits & pat.slices[i].nodes) == pat.slices[i].values;
            expect += ok;
        }
        REQUIRE(pattern_count(tab, pat) == expect);
    }
}

TEST_CASE("node marginals equal direct per-node counts") {
    const auto tab = build_ensemble(k4x4, 8, 3);
    const auto marg = node_marginals(tab);
    const auto brute = brute_windows(k4x4, 8, 3);
    CHECK(marg.total == 65536);
    for (int i = 0; i < 3; ++i)
        for (int site = 0; site < 16; ++site) {
            std::uint64_t alive = 0;
            for (const auto& w : brute) alive += (w.slices[i].bits >> site) & 1u;
            const NodeRef n{8 + i, site};
            REQUIRE(marg.count(n, true) == alive);
            REQUIRE(marg.count(n, false) == 65536 - alive);
        }
}

TEST_CASE("restricting a pattern never lowers its count") {
    const auto tab = build_ensemble(k4x4, 8, 2);
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pat = random_pattern(rng, k4x4, 8, 2);
        const auto nodes = pat.nodes();
        if (nodes.empty()) continue;
        std::vector<NodeRef> half(nodes.begin(), nodes.begin() + nodes.size() / 2);
        CHECK(pattern_count(tab, pat.restricted_to(half)) >= pattern_count(tab, pat));
    }
}

TEST_CASE("translating a pattern preserves its count") {
    // The dynamics commute with translations and the initial distribution is
    // uniform, so window statistics are translation invariant.
    const auto tab = build_ensemble(k4x4, 8, 3);
    std::mt19937 rng(29);
    for (const auto& g : translation_group(k4x4))
        for (int trial = 0; trial < 20; ++trial) {
            const auto pat = random_pattern(rng, k4x4, 8, 3);
            SpatioTemporalPattern moved = pat;
            for (auto& m : moved.slices) {
                m.nodes = apply_symmetry(BitState{m.nodes}, g, k4x4).bits;
                m.values = apply_symmetry(BitState{m.values}, g, k4x4).bits;
            }
            REQUIRE(pattern_count(tab, moved) == pattern_count(tab, pat));
        }
}

TEST_CASE("binary cache round trip") {
    const auto tab = build_ensemble(GridDims{3, 3}, 4, 2);
    const auto path = std::filesystem::temp_directory_path() / "ispt_ens_roundtrip.bin";
    save_ensemble(tab, path);
    const auto loaded = load_ensemble(path);
    CHECK(loaded.dims().width == 3);
    CHECK(loaded.dims().height == 3);
    CHECK(loaded.start_time() == 4);
    CHECK(loaded.length() == 2);
    CHECK(loaded.rule() == tab.rule());
    CHECK(loaded.total() == tab.total());
    REQUIRE(loaded.entries().size() == tab.entries().size());
    for (std::size_t i = 0; i < tab.entries().size(); ++i) {
        CHECK(loaded.entries()[i].key == tab.entries()[i].key);
        CHECK(loaded.entries()[i].multiplicity == tab.entries()[i].multiplicity);
    }
    std::filesystem::remove(path);
}

TEST_CASE("corrupted caches are rejected") {
    const auto tab = build_ensemble(GridDims{3, 3}, 4, 2);
    const auto path = std::filesystem::temp_directory_path() / "ispt_ens_corrupt.bin";
    save_ensemble(tab, path);

    // Truncation.
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 8);
    CHECK_THROWS(load_ensemble(path));

    // Bit flip in the body (checksum mismatch).
    save_ensemble(tab, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(static_cast<std::streamoff>(size) - 16);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(static_cast<std::streamoff>(size) - 16);
        byte = static_cast<char>(byte ^ 0x40);
        f.write(&byte, 1);
    }
    CHECK_THROWS(load_ensemble(path));

    // Wrong magic.
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "NOTANENSEMBLE";
    }
    CHECK_THROWS(load_ensemble(path));
    std::filesystem::remove(path);
}
