#ifndef ISPT_DBN_HPP
#define ISPT_DBN_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "ispt/grid.hpp"

namespace ispt {

// Finite dynamical Bayesian network with time-slice structure. Slices are
// indexed 0..horizon-1; every node in slice t+1 has all its parents in slice
// t, and the union of those parent sets covers slice t.
//
// Joint slice states are mixed-radix encoded: site 0 is the least significant
// digit, radix = state_space.

/// Conditional probability table of one node. rows is indexed by the encoded
/// parent-value tuple; each row is a distribution over the node's states.
struct Mechanism {
    std::vector<int> parent_sites;
    std::vector<std::vector<double>> rows;
};

/// Sparse distribution over encoded joint slice states.
using SliceDist = std::map<std::uint64_t, double>;

struct DynBayesNet {
    int horizon = 0;
    int slice_width = 0;
    int state_space = 2;
    // mechanisms[t-1][site] governs node (t, site), t = 1..horizon-1.
    std::vector<std::vector<Mechanism>> mechanisms;
    SliceDist initial;

    std::uint64_t joint_states() const;

    /// Checks all structural invariants; throws std::invalid_argument.
    void validate() const;
};

/// Full value assignment, values[t][site] in [0, state_space).
using Assignment = std::vector<std::vector<int>>;

/// Probability of a full assignment: p(x_V0) times the product of all
/// mechanism entries.
double joint_probability(const DynBayesNet& net, const Assignment& assignment);

/// One application of the dynamical law: distribution over slice t+1 from the
/// distribution over slice t.
SliceDist propagate(const DynBayesNet& net, const SliceDist& dist_t, int t);

/// Row of the slice t -> t+1 Markov matrix for one joint state.
SliceDist markov_matrix_row(const DynBayesNet& net, std::uint64_t state_t, int t);

std::uint64_t encode_slice(const DynBayesNet& net, const std::vector<int>& values);
std::vector<int> decode_slice(const DynBayesNet& net, std::uint64_t state);

// Text format, see docs/formats.md; load(save(net)) is the identity.
void save_dbn(const DynBayesNet& net, const std::filesystem::path& path);
DynBayesNet load_dbn(const std::filesystem::path& path);

/// Game-of-Life dynamics as a CPT network (9-parent deterministic mechanisms)
/// with the uniform initial distribution.
DynBayesNet life_dbn(GridDims dims, int horizon);

}  // namespace ispt

#endif
