#ifndef ISPT_INTEGRATION_HPP
#define ISPT_INTEGRATION_HPP

#include <limits>
#include <optional>

#include "ispt/ensemble.hpp"
#include "ispt/pattern.hpp"

namespace ispt {

enum class LogBase { two, natural, ten };

/// Multiplier converting a base-2 value into the given base.
double log_base_scale(LogBase base);
const char* log_base_name(LogBase base);

/// Evidence for integration: the local mutual information of a pattern with
/// respect to a partition of its nodes. Zero with occurred=false when the
/// pattern is impossible. May be negative.
struct Evidence {
    double value = 0.0;
    LogBase base = LogBase::two;
    bool occurred = false;
};

Evidence evidence(const EnsembleTable& tab, const SpatioTemporalPattern& pat,
                  const Partition& partition, LogBase base = LogBase::two);

/// Evidence with respect to the finest (all-singletons) partition, computed
/// from precomputed node marginals in O(|nodes|).
Evidence evifpp(const EnsembleTable& tab, const NodeMarginals& marginals,
                const SpatioTemporalPattern& pat, LogBase base = LogBase::two);

Evidence evifpp(const EnsembleTable& tab, const SpatioTemporalPattern& pat,
                LogBase base = LogBase::two);

struct IntegrationDecision {
    bool integrated = false;
    // Singleton patterns have no nontrivial partition; they are integrated by
    // convention and min_evidence stays at the +infinity sentinel.
    double min_evidence = std::numeric_limits<double>::infinity();
    std::optional<Partition> witness;  // first partition with evidence <= 0
    std::uint64_t partitions_checked = 0;
};

/// True iff evidence is positive for every nontrivial partition enumerated
/// under mode. mode=bipartitions is only a necessary-condition screen.
IntegrationDecision is_integrated(const EnsembleTable& tab, const SpatioTemporalPattern& pat,
                                  PartitionMode mode = PartitionMode::all,
                                  LogBase base = LogBase::two);

}  // namespace ispt

#endif
