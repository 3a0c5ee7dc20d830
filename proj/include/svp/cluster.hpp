#pragma once

#include <cstdint>
#include <vector>

#include "svp/matrix.hpp"
#include "svp/models.hpp"

namespace svp {

// Leading-vector clustering: compute u_1, let x be the largest coordinate
// (the decomposition's sign rule makes the largest-magnitude entry
// positive), return every coordinate with value >= x/2. Never empty: the
// maximizer always qualifies. Comparisons use plain >= with no tolerance;
// instances with a coordinate exactly at x/2 are measure zero.
std::vector<int> fsc(const sym_matrix& m);

// Same clustering on the i-th vector. Throws RankDeficient when sigma_i
// falls below the decomposition's rank tolerance.
std::vector<int> ith_clique(const sym_matrix& m, int i);

// One clustering round inside a partition recovery: which vector was
// thresholded, the largest coordinate x, and the selected vertices (in
// original ids).
struct fsc_step {
    int round = 0;
    double x = 0.0;
    std::vector<int> selected;
};

struct predicted_partition {
    int r = 1;
    std::vector<int> labels;     // block id per vertex, 0-based
    std::vector<int> truncated;  // the sampled set S
    std::vector<fsc_step> steps;
    // k_1 rho_1 / (k_r rho_r) from the generating densities: a guarantee
    // hypothesis recorded for diagnostics; the algorithm never consumes it.
    double weight_ratio = 0.0;
};

// Clique partition recovery. Samples S with per-vertex probability
// n^{-1+epsilon} (epsilon = 0 disables the truncation step entirely), runs
// the clustering r-1 times on the transformed graph spanned by the
// remaining vertices, deleting each recovered block, and assigns the last
// block by remainder. Each v in S is attached to the block it is adjacent
// to in full; adjacency to none or to several raises AssignmentAmbiguous,
// because in the clique model that can only follow an upstream recovery
// error. With r = 1 the partition is forced and everything lands in one
// block. Randomness is keyed by (seed, trial): the S draw for vertex v uses
// stream entry v.
predicted_partition clique_partition(const planted_graph& g, int r, double epsilon,
                                     std::uint64_t seed, std::uint32_t trial = 0);

// General-density variant: same truncation and clustering rounds, then a
// reference set Y_i of floor(c_y * n) vertices is drawn from each recovered
// block (first elements under a seeded shuffle; block i's shuffle uses
// stream entries (i+1)*n + j), and each v in S goes to the block holding
// most of its neighbors among Y_i, ties to the lowest block index. Blocks
// smaller than floor(c_y * n) raise BlockTooSmall.
predicted_partition hidden_partition(const planted_graph& g, int r, double epsilon, double c_y,
                                     std::uint64_t seed, std::uint32_t trial = 0);

struct recovery_result {
    bool exact = false;
    int misclassified = 0;  // vertices outside the best label matching
};

// Exact-recovery scoring under the best label matching: exhaustive over
// permutations when at most 8 labels are in play, greedy maximal-overlap
// beyond that. Predicted labels below zero count as misclassified
// unconditionally. Throws UniverseMismatch on length mismatch.
recovery_result score(const std::vector<int>& predicted, const std::vector<int>& truth);

} // namespace svp
