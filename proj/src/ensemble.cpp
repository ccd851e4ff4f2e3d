#include "ispt/ensemble.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ispt {

namespace {

void check_build_args(GridDims dims, int t0, int length) {
    if (dims.cells() > 25)
        throw capacity_error("exhaustive enumeration limited to grids with <= 25 cells");
    if (t0 < 1) throw std::invalid_argument("t0 must be >= 1 (time slices are 1-based)");
    if (length < 1) throw std::invalid_argument("window length must be >= 1");
    if (dims.cells() * length > 128)
        throw capacity_error("window does not fit the 128-bit packed key");
}

}  // namespace

std::uint64_t NodeMarginals::count(NodeRef n, bool value) const {
    const int i = n.time - start_time;
    if (i < 0 || i >= length || n.site < 0 || n.site >= dims.cells())
        throw std::invalid_argument("node outside the marginal window");
    const std::uint64_t a = alive[i][n.site];
    return value ? a : total - a;
}

EnsembleTable::Key EnsembleTable::pack(const TrajectoryWindow& w) const {
    if (static_cast<int>(w.slices.size()) != length_)
        throw std::invalid_argument("window length mismatch");
    Key key = 0;
    for (int i = length_ - 1; i >= 0; --i)
        key = (key << dims_.cells()) | w.slices[i].bits;
    return key;
}

TrajectoryWindow EnsembleTable::unpack(Key key) const {
    const Key mask = (Key(1) << dims_.cells()) - 1;
    TrajectoryWindow w;
    w.start_time = start_time_;
    for (int i = 0; i < length_; ++i) {
        w.slices.push_back(BitState{static_cast<std::uint32_t>(key & mask)});
        key >>= dims_.cells();
    }
    return w;
}

std::uint64_t EnsembleTable::multiplicity(const TrajectoryWindow& w) const {
    const Key key = pack(w);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& e, Key k) { return e.key < k; });
    return (it != entries_.end() && it->key == key) ? it->multiplicity : 0;
}

namespace {

using Key = EnsembleTable::Key;

Key window_key_for_state(const LifeEngine& engine, std::uint32_t s, int steps, int length,
                         int cells) {
    BitState x{s};
    for (int i = 0; i < steps; ++i) x = engine.step(x);
    Key key = 0;
    for (int i = 0; i < length; ++i) {
        key |= Key(x.bits) << (i * cells);
        if (i + 1 < length) x = engine.step(x);
    }
    return key;
}

std::vector<EnsembleTable::Entry> to_entries(const std::map<Key, std::uint64_t>& counts) {
    std::vector<EnsembleTable::Entry> entries;
    entries.reserve(counts.size());
    for (const auto& [key, mult] : counts) entries.push_back({key, mult});
    return entries;
}

}  // namespace

EnsembleTable build_ensemble_serial(GridDims dims, int t0, int length) {
    check_build_args(dims, t0, length);
    const LifeEngine engine(dims);
    std::map<Key, std::uint64_t> counts;
    const std::uint64_t total = std::uint64_t(1) << dims.cells();
    for (std::uint64_t s = 0; s < total; ++s)
        ++counts[window_key_for_state(engine, static_cast<std::uint32_t>(s), t0 - 1, length,
                                      dims.cells())];
    EnsembleTable tab;
    tab.dims_ = dims;
    tab.start_time_ = t0;
    tab.length_ = length;
    tab.total_ = total;
    tab.entries_ = to_entries(counts);
    return tab;
}

EnsembleTable build_ensemble(GridDims dims, int t0, int length, int threads) {
    check_build_args(dims, t0, length);
    const LifeEngine engine(dims);
    const std::uint64_t total = std::uint64_t(1) << dims.cells();

#ifdef _OPENMP
    int num_threads = threads > 0 ? threads : omp_get_max_threads();
#else
    int num_threads = 1;
    (void)threads;
#endif
    std::vector<std::map<Key, std::uint64_t>> partial(num_threads);

#ifdef _OPENMP
#pragma omp parallel num_threads(num_threads)
    {
        auto& local = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < static_cast<std::int64_t>(total); ++s)
            ++local[window_key_for_state(engine, static_cast<std::uint32_t>(s), t0 - 1, length,
                                         dims.cells())];
    }
#else
    for (std::uint64_t s = 0; s < total; ++s)
        ++partial[0][window_key_for_state(engine, static_cast<std::uint32_t>(s), t0 - 1, length,
                                          dims.cells())];
#endif

    // Merge is additive and key-ordered, so the result does not depend on the
    // thread count or schedule.
    std::map<Key, std::uint64_t> counts = std::move(partial[0]);
    for (int i = 1; i < num_threads; ++i)
        for (const auto& [key, mult] : partial[i]) counts[key] += mult;
    EnsembleTable tab;
    tab.dims_ = dims;
    tab.start_time_ = t0;
    tab.length_ = length;
    tab.total_ = total;
    tab.entries_ = to_entries(counts);
    return tab;
}

std::uint64_t pattern_count(const EnsembleTable& tab, const SpatioTemporalPattern& pat) {
    if (pat.dims != tab.dims()) throw std::invalid_argument("pattern grid dims mismatch");
    const int offset = pat.start_time - tab.start_time();
    if (!pat.slices.empty() &&
        (offset < 0 || offset + static_cast<int>(pat.slices.size()) > tab.length()))
        throw std::invalid_argument("pattern node outside the table window");
    const int cells = tab.dims().cells();

    // Fold the per-slice masks into window-key masks for one 128-bit compare.
    Key node_mask = 0, value_mask = 0;
    for (std::size_t i = 0; i < pat.slices.size(); ++i) {
        if (pat.slices[i].values & ~pat.slices[i].nodes)
            throw std::invalid_argument("pattern values outside its node set");
        const int shift = (offset + static_cast<int>(i)) * cells;
        node_mask |= Key(pat.slices[i].nodes) << shift;
        value_mask |= Key(pat.slices[i].values) << shift;
    }

    std::uint64_t count = 0;
    for (const auto& e : tab.entries())
        if (((e.key ^ value_mask) & node_mask) == 0) count += e.multiplicity;
    return count;
}

NodeMarginals node_marginals(const EnsembleTable& tab) {
    NodeMarginals m;
    m.start_time = tab.start_time();
    m.length = tab.length();
    m.dims = tab.dims();
    m.total = tab.total();
    m.alive.assign(tab.length(), std::vector<std::uint64_t>(tab.dims().cells(), 0));
    const int cells = tab.dims().cells();
    for (const auto& e : tab.entries()) {
        Key key = e.key;
        for (int t = 0; t < tab.length(); ++t) {
            auto bits = static_cast<std::uint32_t>(key & ((Key(1) << cells) - 1));
            for (int k = 0; k < cells; ++k)
                if ((bits >> k) & 1u) m.alive[t][k] += e.multiplicity;
            key >>= cells;
        }
    }
    return m;
}

namespace {

constexpr char kMagic[8] = {'I', 'S', 'P', 'T', 'E', 'N', 'S', '1'};

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = 14695981039346656037ull) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <class T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(const std::string& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) throw std::runtime_error("ensemble file truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

void save_ensemble(const EnsembleTable& tab, const std::filesystem::path& path) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put<std::int32_t>(buf, tab.dims().width);
    put<std::int32_t>(buf, tab.dims().height);
    put<std::int32_t>(buf, tab.start_time());
    put<std::int32_t>(buf, tab.length());
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(tab.rule().size()));
    buf.append(tab.rule());
    put<std::uint64_t>(buf, tab.total());
    put<std::uint64_t>(buf, tab.entries().size());
    for (const auto& e : tab.entries()) {
        put<std::uint64_t>(buf, static_cast<std::uint64_t>(e.key));
        put<std::uint64_t>(buf, static_cast<std::uint64_t>(e.key >> 64));
        put<std::uint64_t>(buf, e.multiplicity);
    }
    const std::uint64_t checksum =
        fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    put<std::uint64_t>(buf, checksum);

    // Write to a temp file and rename so a cancelled run never leaves a
    // corrupt cache behind.
    const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

EnsembleTable load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof(kMagic) + sizeof(std::uint64_t) ||
        std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not an ensemble cache file (bad magic): " + path.string());
    const std::size_t body = buf.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof(stored));
    if (fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), body) != stored)
        throw std::runtime_error("ensemble cache checksum mismatch: " + path.string());

    std::size_t pos = sizeof(kMagic);
    EnsembleTable tab;
    tab.dims_.width = get<std::int32_t>(buf, pos);
    tab.dims_.height = get<std::int32_t>(buf, pos);
    tab.start_time_ = get<std::int32_t>(buf, pos);
    tab.length_ = get<std::int32_t>(buf, pos);
    const auto rule_len = get<std::uint32_t>(buf, pos);
    if (pos + rule_len > body) throw std::runtime_error("ensemble file truncated");
    tab.rule_.assign(buf.data() + pos, rule_len);
    pos += rule_len;
    tab.total_ = get<std::uint64_t>(buf, pos);
    const auto n = get<std::uint64_t>(buf, pos);
    tab.entries_.reserve(n);
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto lo = get<std::uint64_t>(buf, pos);
        const auto hi = get<std::uint64_t>(buf, pos);
        const auto mult = get<std::uint64_t>(buf, pos);
        tab.entries_.push_back({(Key(hi) << 64) | Key(lo), mult});
        sum += mult;
    }
    if (sum != tab.total_) throw std::runtime_error("ensemble multiplicities do not sum to total");
    if (!std::is_sorted(tab.entries_.begin(), tab.entries_.end(),
                        [](const auto& a, const auto& b) { return a.key < b.key; }))
        throw std::runtime_error("ensemble entries not sorted");
    return tab;
}

}  // namespace ispt
