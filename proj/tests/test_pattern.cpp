#include <doctest.h>

#include <algorithm>
#include <set>

#include "ispt/pattern.hpp"

using namespace ispt;

namespace {

std::vector<NodeRef> make_nodes(int n) {
    std::vector<NodeRef> out;
    for (int i = 0; i < n; ++i) out.push_back(NodeRef{8, i});
    return out;
}

std::uint64_t count_partitions(int n, PartitionMode mode) {
    std::uint64_t count = 0;
    for_each_partition(make_nodes(n), mode, [&](const Partition&) {
        ++count;
        return true;
    });
    return count;
}

}  // namespace

TEST_CASE("bell numbers") {
    CHECK(bell_number(0) == 1);
    CHECK(bell_number(1) == 1);
    CHECK(bell_number(3) == 5);
    CHECK(bell_number(8) == 4140);
    CHECK(bell_number(12) == 4213597);
}

TEST_CASE("full enumeration yields Bell(n) distinct partitions") {
    for (int n = 1; n <= 8; ++n) {
        std::set<std::vector<std::vector<NodeRef>>> seen;
        for_each_partition(make_nodes(n), PartitionMode::all, [&](const Partition& p) {
            auto blocks = p.blocks;
            for (auto& b : blocks) std::sort(b.begin(), b.end());
            std::sort(blocks.begin(), blocks.end());
            CHECK(seen.insert(blocks).second);  // each partition exactly once
            p.validate(make_nodes(n));
            return true;
        });
        CHECK(seen.size() == bell_number(n));
    }
}

TEST_CASE("bipartition enumeration yields 2^(n-1)-1 partitions") {
    for (int n = 2; n <= 20; n += 3)
        CHECK(count_partitions(n, PartitionMode::bipartitions) == (1ull << (n - 1)) - 1);
    CHECK(count_partitions(1, PartitionMode::bipartitions) == 0);
    CHECK(count_partitions(4, PartitionMode::bipartitions) == 7);
}

TEST_CASE("singleton node set has exactly the trivial partition") {
    std::vector<Partition> got;
    for_each_partition(make_nodes(1), PartitionMode::all, [&](const Partition& p) {
        got.push_back(p);
        return true;
    });
    REQUIRE(got.size() == 1);
    CHECK(got[0].blocks.size() == 1);
}

TEST_CASE("full enumeration above 12 nodes is a capacity error") {
    CHECK_THROWS_AS(count_partitions(13, PartitionMode::all), capacity_error);
}

TEST_CASE("partition validation rejects overlap and gaps") {
    const auto nodes = make_nodes(3);
    Partition overlap{{{nodes[0], nodes[1]}, {nodes[1], nodes[2]}}};
    CHECK_THROWS_AS(overlap.validate(nodes), std::invalid_argument);
    Partition missing{{{nodes[0]}, {nodes[1]}}};
    CHECK_THROWS_AS(missing.validate(nodes), std::invalid_argument);
    Partition empty_block{{{nodes[0], nodes[1], nodes[2]}, {}}};
    CHECK_THROWS_AS(empty_block.validate(nodes), std::invalid_argument);
}

TEST_CASE("pattern node bookkeeping and restriction") {
    SpatioTemporalPattern pat;
    pat.dims = GridDims{4, 4};
    pat.start_time = 8;
    pat.set_node(NodeRef{8, 0}, true);
    pat.set_node(NodeRef{9, 5}, false);
    pat.set_node(NodeRef{10, 15}, true);

    CHECK(pat.node_count() == 3);
    CHECK(pat.value_at(NodeRef{8, 0}) == true);
    CHECK(pat.value_at(NodeRef{9, 5}) == false);
    CHECK_THROWS_AS(pat.value_at(NodeRef{9, 6}), std::invalid_argument);

    const std::vector<NodeRef> block{NodeRef{8, 0}, NodeRef{10, 15}};
    const auto sub = pat.restricted_to(block);
    CHECK(sub.node_count() == 2);
    CHECK(sub.value_at(NodeRef{10, 15}) == true);
    CHECK_FALSE(sub.has_node(NodeRef{9, 5}));
}

TEST_CASE("from_window reads values off the window") {
    const std::vector<BitState> window{BitState{0x000f}, BitState{0x00f0}};
    const std::vector<std::uint32_t> masks{0x0003u, 0x0300u};
    const auto pat =
        SpatioTemporalPattern::from_window(GridDims{4, 4}, 8, window, masks);
    CHECK(pat.value_at(NodeRef{8, 0}) == true);
    CHECK(pat.value_at(NodeRef{8, 1}) == true);
    CHECK(pat.value_at(NodeRef{9, 8}) == false);
    CHECK(pat.value_at(NodeRef{9, 9}) == false);
    CHECK(pat.node_count() == 4);
}
