#ifndef ISPT_PATTERN_HPP
#define ISPT_PATTERN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ispt/grid.hpp"

namespace ispt {

/// One node of the network: time slice label (1-based, t=1 is the initial
/// state) and cell index within the slice.
struct NodeRef {
    int time = 0;
    int site = 0;

    auto operator<=>(const NodeRef&) const = default;
};

/// Per-slice node/value masks of a pattern. values must be a subset of nodes.
struct SliceMask {
    std::uint32_t nodes = 0;
    std::uint32_t values = 0;

    bool operator==(const SliceMask&) const = default;
};

/// A set of (time, cell) nodes with fixed binary values.
struct SpatioTemporalPattern {
    GridDims dims;
    int start_time = 8;           // time label of slices[0]
    std::vector<SliceMask> slices;

    int node_count() const;
    std::vector<NodeRef> nodes() const;
    bool has_node(NodeRef n) const;
    bool value_at(NodeRef n) const;
    void set_node(NodeRef n, bool value);

    /// Sub-pattern containing only the given nodes.
    SpatioTemporalPattern restricted_to(std::span<const NodeRef> block) const;

    /// Pattern fixing the window's values at the masked nodes.
    static SpatioTemporalPattern from_window(GridDims dims, int start_time,
                                             std::span<const BitState> window,
                                             std::span<const std::uint32_t> node_masks);

    bool operator==(const SpatioTemporalPattern&) const = default;
};

/// A partition of a pattern's node set into disjoint nonempty blocks.
struct Partition {
    std::vector<std::vector<NodeRef>> blocks;

    static Partition trivial(std::span<const NodeRef> nodes);
    static Partition singletons(std::span<const NodeRef> nodes);

    /// Throws unless blocks are disjoint, nonempty, and cover exactly `nodes`.
    void validate(std::span<const NodeRef> nodes) const;
};

enum class PartitionMode { all, bipartitions };

/// Calls fn once per set partition (mode all: every one, restricted-growth
/// enumeration, |nodes| <= 12; mode bipartitions: every 2-block partition).
/// Enumeration stops early when fn returns false.
void for_each_partition(std::span<const NodeRef> nodes, PartitionMode mode,
                        const std::function<bool(const Partition&)>& fn);

std::uint64_t bell_number(int n);

}  // namespace ispt

#endif
