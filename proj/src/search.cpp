#include "ispt/search.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <map>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ispt {

namespace {

double window_evifpp_bits(const EnsembleTable& tab, const NodeMarginals& marg,
                          const TrajectoryWindow& w, std::uint64_t mult) {
    const double log_total = std::log2(static_cast<double>(tab.total()));
    double bits = std::log2(static_cast<double>(mult)) - log_total;
    for (int t = 0; t < tab.length(); ++t)
        for (int k = 0; k < tab.dims().cells(); ++k) {
            const bool v = (w.slices[t].bits >> k) & 1u;
            bits -= std::log2(static_cast<double>(
                        marg.count(NodeRef{tab.start_time() + t, k}, v))) -
                    log_total;
        }
    return bits;
}

}  // namespace

std::vector<GlobalRankEntry> rank_global_patterns(const EnsembleTable& tab,
                                                  const std::vector<GridSymmetry>& group,
                                                  LogBase base) {
    const NodeMarginals marg = node_marginals(tab);
    const double scale = log_base_scale(base);

    struct Orbit {
        double evifpp;
        std::uint64_t multiplicity;
        std::uint64_t windows;
    };
    std::map<std::vector<BitState>, Orbit> orbits;
    for (const auto& e : tab.entries()) {
        const TrajectoryWindow w = tab.unpack(e.key);
        const double value = window_evifpp_bits(tab, marg, w, e.multiplicity) * scale;
        auto canon = canonical_form(w.slices, group, tab.dims());
        auto [it, inserted] = orbits.try_emplace(std::move(canon),
                                                 Orbit{value, e.multiplicity, 0});
        ++it->second.windows;
        // Symmetric windows have identical multiplicity and EVIFPP; the
        // uniform initial distribution guarantees it.
        assert(std::abs(it->second.evifpp - value) < 1e-9);
        assert(it->second.multiplicity == e.multiplicity);
    }

    std::vector<GlobalRankEntry> out;
    out.reserve(orbits.size());
    for (const auto& [canon, orbit] : orbits)
        out.push_back(GlobalRankEntry{TrajectoryWindow{tab.start_time(), canon}, orbit.evifpp,
                                      orbit.multiplicity, orbit.windows});
    std::sort(out.begin(), out.end(), [](const GlobalRankEntry& a, const GlobalRankEntry& b) {
        if (a.evifpp != b.evifpp) return a.evifpp > b.evifpp;
        return a.window < b.window;
    });
    return out;
}

std::vector<std::uint32_t> subset_masks(int cells, int n) {
    if (n < 0 || n > cells) throw std::invalid_argument("subset size out of range");
    std::vector<std::uint32_t> out;
    // Lexicographic over ascending member lists.
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    for (;;) {
        std::uint32_t m = 0;
        for (int i : pick) m |= 1u << i;
        out.push_back(m);
        int i = n - 1;
        while (i >= 0 && pick[i] == cells - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

namespace {

struct SearchContext {
    const EnsembleTable& tab;
    SubsetPatternSpec spec;
    std::vector<std::uint32_t> subsets;        // per-slice candidate masks
    std::vector<std::vector<double>> denom;    // [slice][subset] sum of log2 marginals (bits)
    std::uint64_t num_candidates = 0;          // K^L
    std::size_t K = 0;
};

SearchContext make_context(const EnsembleTable& tab, const SubsetPatternSpec& spec) {
    const int cells = tab.dims().cells();
    const int n = spec.cells_per_slice;
    if (static_cast<int>(spec.reference.slices.size()) != tab.length() ||
        spec.reference.start_time != tab.start_time())
        throw std::invalid_argument("reference window does not match the table window");
    if (tab.multiplicity(spec.reference) == 0)
        throw std::invalid_argument("reference window does not occur in the ensemble");

    SearchContext ctx{tab, spec};
    ctx.subsets = subset_masks(cells, n);
    ctx.K = ctx.subsets.size();

    double cand = 1.0;
    for (int t = 0; t < tab.length(); ++t) cand *= static_cast<double>(ctx.K);
    if (cand > static_cast<double>(1ull << 28))
        throw capacity_error("subset search space exceeds 2^28 candidates");
    ctx.num_candidates = 1;
    for (int t = 0; t < tab.length(); ++t) ctx.num_candidates *= ctx.K;

    const NodeMarginals marg = node_marginals(tab);
    const double log_total = std::log2(static_cast<double>(tab.total()));
    ctx.denom.assign(tab.length(), std::vector<double>(ctx.K, 0.0));
    std::vector<std::uint64_t> counts;
    for (int t = 0; t < tab.length(); ++t)
        for (std::size_t i = 0; i < ctx.K; ++i) {
            // Summing the log terms in sorted count order makes the result
            // invariant under site permutations, so translated node sets get
            // bitwise-identical denominators.
            counts.clear();
            for (int k = 0; k < cells; ++k) {
                if (!((ctx.subsets[i] >> k) & 1u)) continue;
                const bool v = (spec.reference.slices[t].bits >> k) & 1u;
                counts.push_back(marg.count(NodeRef{tab.start_time() + t, k}, v));
            }
            std::sort(counts.begin(), counts.end());
            double d = 0.0;
            for (const std::uint64_t c : counts)
                d += std::log2(static_cast<double>(c)) - log_total;
            ctx.denom[t][i] = d;
        }
    return ctx;
}

/// Joint counts for every candidate, accumulated per distinct window from its
/// per-slice agreement masks: a slice disagreeing with the reference in d
/// cells is compatible with exactly the n-subsets avoiding those d cells.
std::vector<std::uint64_t> candidate_counts(const SearchContext& ctx) {
    const EnsembleTable& tab = ctx.tab;
    const int cells = tab.dims().cells();
    const int n = ctx.spec.cells_per_slice;
    const std::uint32_t all = (cells == 32) ? ~0u : ((1u << cells) - 1u);
    const int L = tab.length();

    std::unordered_map<std::uint32_t, std::size_t> subset_index;
    subset_index.reserve(ctx.K * 2);
    for (std::size_t i = 0; i < ctx.K; ++i) subset_index.emplace(ctx.subsets[i], i);

    std::vector<std::uint64_t> counts(ctx.num_candidates, 0);
    std::vector<std::vector<std::size_t>> compatible(L);
    for (const auto& e : tab.entries()) {
        const TrajectoryWindow w = tab.unpack(e.key);
        bool viable = true;
        for (int t = 0; t < L && viable; ++t) {
            const std::uint32_t agree =
                ~(w.slices[t].bits ^ ctx.spec.reference.slices[t].bits) & all;
            if (std::popcount(agree) < n) {
                viable = false;
                break;
            }
            // n-subsets of the agreeing cells.
            std::vector<int> bits;
            for (int k = 0; k < cells; ++k)
                if ((agree >> k) & 1u) bits.push_back(k);
            auto& comp = compatible[t];
            comp.clear();
            std::vector<int> pick(n);
            for (int i = 0; i < n; ++i) pick[i] = i;
            for (;;) {
                std::uint32_t m = 0;
                for (int i : pick) m |= 1u << bits[i];
                comp.push_back(subset_index.at(m));
                int i = n - 1;
                while (i >= 0 && pick[i] == static_cast<int>(bits.size()) - n + i) --i;
                if (i < 0) break;
                ++pick[i];
                for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
            }
        }
        if (!viable) continue;
        // Flat index: slice 0 most significant.
        auto add = [&](auto&& self, int t, std::uint64_t base) -> void {
            if (t == L) {
                counts[base] += e.multiplicity;
                return;
            }
            for (std::size_t i : compatible[t]) self(self, t + 1, base * ctx.K + i);
        };
        add(add, 0, 0);
    }
    return counts;
}

double candidate_value_bits(const SearchContext& ctx, const std::vector<std::uint64_t>& counts,
                            std::uint64_t flat) {
    const int L = ctx.tab.length();
    double bits = std::log2(static_cast<double>(counts[flat])) -
                  std::log2(static_cast<double>(ctx.tab.total()));
    std::uint64_t rem = flat;
    for (int t = L - 1; t >= 0; --t) {
        bits -= ctx.denom[t][rem % ctx.K];
        rem /= ctx.K;
    }
    return bits;
}

std::vector<std::uint32_t> masks_of(const SearchContext& ctx, std::uint64_t flat) {
    const int L = ctx.tab.length();
    std::vector<std::uint32_t> masks(L);
    for (int t = L - 1; t >= 0; --t) {
        masks[t] = ctx.subsets[flat % ctx.K];
        flat /= ctx.K;
    }
    return masks;
}

}  // namespace

SubsetSearchResult search_subsets(const EnsembleTable& tab, const SubsetPatternSpec& spec,
                                  Objective objective, LogBase base, bool collect_co_optimal,
                                  int threads) {
    const SearchContext ctx = make_context(tab, spec);
    const auto counts = candidate_counts(ctx);
    const double sign = (objective == Objective::maximize) ? 1.0 : -1.0;
    const auto total = static_cast<std::int64_t>(ctx.num_candidates);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif

    // Pass 1: the extremum. Thread-local bests merge to a schedule-independent
    // result because each candidate's value is a pure function of its index.
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_flat = -1;
#ifdef _OPENMP
#pragma omp parallel
    {
        double lbest = -std::numeric_limits<double>::infinity();
        std::int64_t lflat = -1;
#pragma omp for schedule(static)
        for (std::int64_t f = 0; f < total; ++f) {
            assert(counts[f] > 0);
            const double v = sign * candidate_value_bits(ctx, counts, f);
            if (v > lbest) {
                lbest = v;
                lflat = f;
            }
        }
#pragma omp critical
        {
            if (lbest > best || (lbest == best && lflat < best_flat)) {
                best = lbest;
                best_flat = lflat;
            }
        }
    }
#else
    for (std::int64_t f = 0; f < total; ++f) {
        const double v = sign * candidate_value_bits(ctx, counts, f);
        if (v > best) {
            best = v;
            best_flat = f;
        }
    }
#endif

    // Pass 2: co-optimal candidates and the lexicographically least one.
    const double tol = 1e-9;
    std::uint64_t co = 0;
    std::int64_t first = best_flat;
    std::vector<std::vector<std::uint32_t>> optima;
#ifdef _OPENMP
#pragma omp parallel
    {
        std::uint64_t lco = 0;
        std::int64_t lfirst = -1;
        std::vector<std::vector<std::uint32_t>> lopt;
#pragma omp for schedule(static)
        for (std::int64_t f = 0; f < total; ++f) {
            const double v = sign * candidate_value_bits(ctx, counts, f);
            if (std::abs(v - best) <= tol) {
                ++lco;
                if (lfirst < 0) lfirst = f;
                if (collect_co_optimal) lopt.push_back(masks_of(ctx, f));
            }
        }
#pragma omp critical
        {
            co += lco;
            if (lfirst >= 0 && lfirst < first) first = lfirst;
            for (auto& m : lopt) optima.push_back(std::move(m));
        }
    }
    if (collect_co_optimal) std::sort(optima.begin(), optima.end());
#else
    for (std::int64_t f = 0; f < total; ++f) {
        const double v = sign * candidate_value_bits(ctx, counts, f);
        if (std::abs(v - best) <= tol) {
            ++co;
            if (first < 0 || f < first) first = std::min(first, f);
            if (collect_co_optimal) optima.push_back(masks_of(ctx, f));
        }
    }
#endif

    SubsetSearchResult out;
    out.evifpp = sign * best * log_base_scale(base);
    out.node_masks = masks_of(ctx, first);
    out.joint_count = counts[first];
    out.co_optimal = co;
    out.candidates = ctx.num_candidates;
    out.optima = std::move(optima);
    return out;
}

SubsetSearchResult search_subsets_reference(const EnsembleTable& tab,
                                            const SubsetPatternSpec& spec, Objective objective,
                                            LogBase base) {
    const SearchContext ctx = make_context(tab, spec);
    const NodeMarginals marg = node_marginals(tab);
    const double sign = (objective == Objective::maximize) ? 1.0 : -1.0;

    auto value_of = [&](std::uint64_t flat) {
        const auto masks = masks_of(ctx, flat);
        const auto pat = SpatioTemporalPattern::from_window(
            tab.dims(), tab.start_time(), spec.reference.slices, masks);
        return evifpp(tab, marg, pat, LogBase::two).value;
    };

    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_flat = 0;
    for (std::uint64_t f = 0; f < ctx.num_candidates; ++f) {
        const double v = sign * value_of(f);
        if (v > best) {
            best = v;
            best_flat = f;
        }
    }
    std::uint64_t co = 0;
    for (std::uint64_t f = 0; f < ctx.num_candidates; ++f)
        if (std::abs(sign * value_of(f) - best) <= 1e-9) ++co;

    SubsetSearchResult out;
    out.evifpp = sign * best * log_base_scale(base);
    out.node_masks = masks_of(ctx, best_flat);
    out.joint_count = pattern_count(tab, SpatioTemporalPattern::from_window(
                                             tab.dims(), tab.start_time(),
                                             spec.reference.slices, out.node_masks));
    out.co_optimal = co;
    out.candidates = ctx.num_candidates;
    return out;
}

std::vector<Evidence> evaluate_fixed_nodes_batch(
    const EnsembleTable& tab, const TrajectoryWindow& window,
    std::span<const std::vector<std::uint32_t>> node_sets, LogBase base) {
    if (node_sets.empty()) return {};
    const int n = std::popcount(node_sets.front().front());
    SubsetPatternSpec spec{window, n};
    const SearchContext ctx = make_context(tab, spec);
    const auto counts = candidate_counts(ctx);

    std::unordered_map<std::uint32_t, std::size_t> subset_index;
    for (std::size_t i = 0; i < ctx.K; ++i) subset_index.emplace(ctx.subsets[i], i);

    std::vector<Evidence> out;
    out.reserve(node_sets.size());
    for (const auto& masks : node_sets) {
        if (static_cast<int>(masks.size()) != tab.length())
            throw std::invalid_argument("one node mask per slice required");
        std::uint64_t flat = 0;
        for (const std::uint32_t m : masks) {
            if (std::popcount(m) != n)
                throw std::invalid_argument("batch node sets must share one per-slice size");
            flat = flat * ctx.K + subset_index.at(m);
        }
        const double bits = candidate_value_bits(ctx, counts, flat);
        out.push_back(Evidence{bits * log_base_scale(base), base, true});
    }
    return out;
}

Evidence evaluate_fixed_nodes(const EnsembleTable& tab, const NodeMarginals& marginals,
                              const TrajectoryWindow& window,
                              std::span<const std::uint32_t> node_masks, LogBase base) {
    if (tab.multiplicity(window) == 0)
        throw std::invalid_argument("window does not occur in the ensemble");
    const auto pat = SpatioTemporalPattern::from_window(tab.dims(), window.start_time,
                                                        window.slices, node_masks);
    return evifpp(tab, marginals, pat, base);
}

}  // namespace ispt
