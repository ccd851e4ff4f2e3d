#include "ispt/integration.hpp"

#include <cassert>
#include <cmath>

namespace ispt {

double log_base_scale(LogBase base) {
    switch (base) {
        case LogBase::two: return 1.0;
        case LogBase::natural: return std::log(2.0);
        case LogBase::ten: return std::log10(2.0);
    }
    return 1.0;
}

const char* log_base_name(LogBase base) {
    switch (base) {
        case LogBase::two: return "2";
        case LogBase::natural: return "e";
        case LogBase::ten: return "10";
    }
    return "?";
}

Evidence evidence(const EnsembleTable& tab, const SpatioTemporalPattern& pat,
                  const Partition& partition, LogBase base) {
    const auto nodes = pat.nodes();
    partition.validate(nodes);

    const std::uint64_t joint = pattern_count(tab, pat);
    if (joint == 0) return Evidence{0.0, base, false};

    // log2 p_O - sum_b log2 p_b, all probabilities exact counts over total.
    double bits = std::log2(static_cast<double>(joint)) -
                  std::log2(static_cast<double>(tab.total()));
    for (const auto& block : partition.blocks) {
        const std::uint64_t c = pattern_count(tab, pat.restricted_to(block));
        // Monotonicity: a sub-pattern of an occurring pattern occurs.
        assert(c > 0);
        bits -= std::log2(static_cast<double>(c)) - std::log2(static_cast<double>(tab.total()));
    }
    return Evidence{bits * log_base_scale(base), base, true};
}

Evidence evifpp(const EnsembleTable& tab, const NodeMarginals& marginals,
                const SpatioTemporalPattern& pat, LogBase base) {
    const std::uint64_t joint = pattern_count(tab, pat);
    if (joint == 0) return Evidence{0.0, base, false};

    const double log_total = std::log2(static_cast<double>(tab.total()));
    double bits = std::log2(static_cast<double>(joint)) - log_total;
    for (const NodeRef& n : pat.nodes()) {
        const std::uint64_t c = marginals.count(n, pat.value_at(n));
        assert(c > 0);
        bits -= std::log2(static_cast<double>(c)) - log_total;
    }
    return Evidence{bits * log_base_scale(base), base, true};
}

Evidence evifpp(const EnsembleTable& tab, const SpatioTemporalPattern& pat, LogBase base) {
    return evifpp(tab, node_marginals(tab), pat, base);
}

IntegrationDecision is_integrated(const EnsembleTable& tab, const SpatioTemporalPattern& pat,
                                  PartitionMode mode, LogBase base) {
    if (pattern_count(tab, pat) == 0)
        throw std::invalid_argument("is_integrated requires an occurring pattern");

    const auto nodes = pat.nodes();
    IntegrationDecision out;
    out.integrated = true;
    for_each_partition(nodes, mode, [&](const Partition& p) {
        if (p.blocks.size() < 2) return true;  // trivial partition excluded
        const Evidence e = evidence(tab, pat, p, base);
        ++out.partitions_checked;
        if (e.value < out.min_evidence) out.min_evidence = e.value;
        if (e.value <= 0.0 && !out.witness) {
            out.integrated = false;
            out.witness = p;
        }
        return true;
    });
    return out;
}

}  // namespace ispt
