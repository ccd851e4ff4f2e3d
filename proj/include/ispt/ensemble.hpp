#ifndef ISPT_ENSEMBLE_HPP
#define ISPT_ENSEMBLE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ispt/grid.hpp"
#include "ispt/pattern.hpp"

namespace ispt {

/// A per-initial-state sequence of grid states. start_time is a 1-based
/// slice label: t=1 is the initial state itself.
struct TrajectoryWindow {
    int start_time = 8;
    std::vector<BitState> slices;

    auto operator<=>(const TrajectoryWindow&) const = default;
};

/// Exact per-node marginal counts over the ensemble, denominator = total.
struct NodeMarginals {
    int start_time = 8;
    int length = 0;
    GridDims dims;
    std::uint64_t total = 0;
    std::vector<std::vector<std::uint64_t>> alive;  // [slice][site] count of value 1

    std::uint64_t count(NodeRef n, bool value) const;
};

/// The exact distribution over trajectory windows induced by the uniform
/// initial distribution: distinct windows with multiplicity counts.
/// Immutable once built; safe for shared concurrent reads.
class EnsembleTable {
public:
    using Key = unsigned __int128;

    struct Entry {
        Key key;
        std::uint64_t multiplicity;
    };

    GridDims dims() const { return dims_; }
    int start_time() const { return start_time_; }
    int length() const { return length_; }
    const std::string& rule() const { return rule_; }
    std::uint64_t total() const { return total_; }
    const std::vector<Entry>& entries() const { return entries_; }

    Key pack(const TrajectoryWindow& w) const;
    TrajectoryWindow unpack(Key key) const;

    /// Multiplicity of one exact window, 0 if absent.
    std::uint64_t multiplicity(const TrajectoryWindow& w) const;

private:
    friend EnsembleTable build_ensemble(GridDims, int, int, int);
    friend EnsembleTable build_ensemble_serial(GridDims, int, int);
    friend EnsembleTable load_ensemble(const std::filesystem::path&);

    GridDims dims_;
    int start_time_ = 8;
    int length_ = 3;
    std::string rule_ = "B3/S23";
    std::uint64_t total_ = 0;
    std::vector<Entry> entries_;  // sorted by key
};

/// Evolves every initial state t0-1 steps and tabulates the windows of the
/// next L slices. Parallel over the initial-state range; output is
/// bit-identical regardless of thread count. threads=0 uses the OpenMP default.
EnsembleTable build_ensemble(GridDims dims, int t0, int length, int threads = 0);

/// Single-threaded reference build, kept for testing and benchmarking.
EnsembleTable build_ensemble_serial(GridDims dims, int t0, int length);

/// Exact count of initial states whose window agrees with the pattern on all
/// its nodes. Probability = count / total.
std::uint64_t pattern_count(const EnsembleTable& tab, const SpatioTemporalPattern& pat);

NodeMarginals node_marginals(const EnsembleTable& tab);

// Versioned binary cache, checksummed; see docs/formats.md.
void save_ensemble(const EnsembleTable& tab, const std::filesystem::path& path);
EnsembleTable load_ensemble(const std::filesystem::path& path);

}  // namespace ispt

#endif
