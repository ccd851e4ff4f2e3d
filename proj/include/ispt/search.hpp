#ifndef ISPT_SEARCH_HPP
#define ISPT_SEARCH_HPP

#include "ispt/ensemble.hpp"
#include "ispt/integration.hpp"

namespace ispt {

struct GlobalRankEntry {
    TrajectoryWindow window;  // canonical orbit representative
    double evifpp = 0.0;
    std::uint64_t multiplicity = 0;   // of the representative window
    std::uint64_t orbit_windows = 0;  // distinct ensemble windows in the orbit
};

/// EVIFPP of every distinct full window, one representative per symmetry
/// orbit, sorted by descending EVIFPP (ties by canonical window order).
std::vector<GlobalRankEntry> rank_global_patterns(const EnsembleTable& tab,
                                                  const std::vector<GridSymmetry>& group,
                                                  LogBase base = LogBase::two);

/// Fix cells_per_slice cells per time slice to the reference window's values.
struct SubsetPatternSpec {
    TrajectoryWindow reference;
    int cells_per_slice = 14;
};

enum class Objective { minimize, maximize };

struct SubsetSearchResult {
    double evifpp = 0.0;
    std::vector<std::uint32_t> node_masks;  // lexicographically least optimum
    std::uint64_t joint_count = 0;
    std::uint64_t co_optimal = 0;  // candidates within 1e-9 of the optimum
    std::uint64_t candidates = 0;
    // All co-optimal node-mask choices, filled when collect_co_optimal is set.
    std::vector<std::vector<std::uint32_t>> optima;
};

/// Exhaustive scan over all C(cells, n)^L per-slice subset choices.
/// Parallel; the result is independent of thread count. The candidate joint
/// counts come from per-window agreement masks against the reference.
SubsetSearchResult search_subsets(const EnsembleTable& tab, const SubsetPatternSpec& spec,
                                  Objective objective, LogBase base = LogBase::two,
                                  bool collect_co_optimal = false, int threads = 0);

/// Serial slow path: evaluates every candidate through pattern_count.
/// Reference implementation for tests and benchmarks.
SubsetSearchResult search_subsets_reference(const EnsembleTable& tab,
                                            const SubsetPatternSpec& spec, Objective objective,
                                            LogBase base = LogBase::two);

/// EVIFPP of the pattern fixing the window's values at the given nodes.
Evidence evaluate_fixed_nodes(const EnsembleTable& tab, const NodeMarginals& marginals,
                              const TrajectoryWindow& window,
                              std::span<const std::uint32_t> node_masks,
                              LogBase base = LogBase::two);

/// evaluate_fixed_nodes for many node sets sharing one per-slice size, via the
/// same agreement-mask tabulation as search_subsets.
std::vector<Evidence> evaluate_fixed_nodes_batch(
    const EnsembleTable& tab, const TrajectoryWindow& window,
    std::span<const std::vector<std::uint32_t>> node_sets, LogBase base = LogBase::two);

/// All n-element subsets of [0, cells) as bit masks, lexicographic by
/// ascending member list.
std::vector<std::uint32_t> subset_masks(int cells, int n);

}  // namespace ispt

#endif
