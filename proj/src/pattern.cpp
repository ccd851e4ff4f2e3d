#include "ispt/pattern.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace ispt {

int SpatioTemporalPattern::node_count() const {
    int n = 0;
    for (const auto& s : slices) n += std::popcount(s.nodes);
    return n;
}

std::vector<NodeRef> SpatioTemporalPattern::nodes() const {
    std::vector<NodeRef> out;
    for (std::size_t i = 0; i < slices.size(); ++i)
        for (int k = 0; k < dims.cells(); ++k)
            if ((slices[i].nodes >> k) & 1u)
                out.push_back(NodeRef{start_time + static_cast<int>(i), k});
    return out;
}

bool SpatioTemporalPattern::has_node(NodeRef n) const {
    const int i = n.time - start_time;
    if (i < 0 || i >= static_cast<int>(slices.size())) return false;
    if (n.site < 0 || n.site >= dims.cells()) return false;
    return (slices[i].nodes >> n.site) & 1u;
}

bool SpatioTemporalPattern::value_at(NodeRef n) const {
    if (!has_node(n)) throw std::invalid_argument("node not in pattern");
    return (slices[n.time - start_time].values >> n.site) & 1u;
}

void SpatioTemporalPattern::set_node(NodeRef n, bool value) {
    const int i = n.time - start_time;
    if (i < 0 || n.site < 0 || n.site >= dims.cells())
        throw std::invalid_argument("node outside pattern window");
    if (i >= static_cast<int>(slices.size())) slices.resize(i + 1);
    slices[i].nodes |= 1u << n.site;
    if (value)
        slices[i].values |= 1u << n.site;
    else
        slices[i].values &= ~(1u << n.site);
}

SpatioTemporalPattern SpatioTemporalPattern::restricted_to(std::span<const NodeRef> block) const {
    SpatioTemporalPattern out;
    out.dims = dims;
    out.start_time = start_time;
    out.slices.assign(slices.size(), SliceMask{});
    for (const NodeRef& n : block) {
        if (!has_node(n)) throw std::invalid_argument("block node not in pattern");
        out.set_node(n, value_at(n));
    }
    return out;
}

SpatioTemporalPattern SpatioTemporalPattern::from_window(
    GridDims dims, int start_time, std::span<const BitState> window,
    std::span<const std::uint32_t> node_masks) {
    if (node_masks.size() != window.size())
        throw std::invalid_argument("one node mask per window slice required");
    const std::uint32_t all = (dims.cells() == 32) ? ~0u : ((1u << dims.cells()) - 1u);
    SpatioTemporalPattern out;
    out.dims = dims;
    out.start_time = start_time;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (node_masks[i] & ~all) throw std::invalid_argument("node mask outside grid");
        out.slices.push_back(SliceMask{node_masks[i], window[i].bits & node_masks[i]});
    }
    return out;
}

Partition Partition::trivial(std::span<const NodeRef> nodes) {
    Partition p;
    p.blocks.emplace_back(nodes.begin(), nodes.end());
    return p;
}

Partition Partition::singletons(std::span<const NodeRef> nodes) {
    Partition p;
    for (const NodeRef& n : nodes) p.blocks.push_back({n});
    return p;
}

void Partition::validate(std::span<const NodeRef> nodes) const {
    std::set<NodeRef> seen;
    std::size_t count = 0;
    for (const auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("partition block is empty");
        for (const NodeRef& n : b) {
            if (!seen.insert(n).second)
                throw std::invalid_argument("partition blocks overlap");
            ++count;
        }
    }
    if (count != nodes.size()) throw std::invalid_argument("partition does not cover the node set");
    for (const NodeRef& n : nodes)
        if (!seen.count(n)) throw std::invalid_argument("partition misses a node");
}

namespace {

Partition from_rgs(std::span<const NodeRef> nodes, const std::vector<int>& rgs, int num_blocks) {
    Partition p;
    p.blocks.resize(num_blocks);
    for (std::size_t i = 0; i < nodes.size(); ++i) p.blocks[rgs[i]].push_back(nodes[i]);
    return p;
}

}  // namespace

void for_each_partition(std::span<const NodeRef> nodes, PartitionMode mode,
                        const std::function<bool(const Partition&)>& fn) {
    const int n = static_cast<int>(nodes.size());
    if (n == 0) return;
    if (mode == PartitionMode::bipartitions) {
        if (n > 63) throw capacity_error("bipartition enumeration capped at 63 nodes");
        // Proper subsets containing node 0, i.e. 2^(n-1)-1 bipartitions.
        for (std::uint64_t m = 0; m + 1 < (1ull << (n - 1)); ++m) {
            const std::uint64_t first = (m << 1) | 1ull;
            Partition p;
            p.blocks.resize(2);
            for (int i = 0; i < n; ++i) p.blocks[(first >> i) & 1ull ? 0 : 1].push_back(nodes[i]);
            if (!fn(p)) return;
        }
        return;
    }
    if (n > 12) throw capacity_error("full partition enumeration capped at 12 nodes");
    // Restricted growth strings: a[0]=0, a[i] <= 1+max(a[0..i-1]).
    std::vector<int> a(n, 0), amax(n, 0);
    for (;;) {
        if (!fn(from_rgs(nodes, a, amax[n - 1] + 1))) return;
        int i = n - 1;
        while (i > 0 && a[i] == amax[i - 1] + 1) --i;
        if (i == 0) return;
        ++a[i];
        amax[i] = std::max(amax[i - 1], a[i]);
        for (int j = i + 1; j < n; ++j) {
            a[j] = 0;
            amax[j] = amax[i];
        }
    }
}

std::uint64_t bell_number(int n) {
    if (n < 0) throw std::invalid_argument("bell_number: negative n");
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

}  // namespace ispt
