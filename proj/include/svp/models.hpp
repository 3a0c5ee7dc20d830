#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svp/decompose.hpp"
#include "svp/matrix.hpp"
#include "svp/rng.hpp"

namespace svp {

// Block partition of contiguous vertex groups: sizes k_1..k_r, within-block
// edge densities p_1..p_r, cross-block density q.
struct partition_spec {
    std::vector<int> sizes;
    std::vector<double> densities;
    double cross = 0.5;

    int r() const { return static_cast<int>(sizes.size()); }
    int n() const;
    void validate() const; // BadPartition / BadDensity on malformed input

    // Expected transformed block value (p_i - q)/(1 - q); equals 2 p_i - 1
    // at cross density 1/2.
    double block_value(int i) const;
};

enum class noise_kind {
    rademacher,
    truncated_gaussian,
    centered_edge,
    partition_edge,
    completion_sampling,
};

const char* noise_kind_name(noise_kind k);
noise_kind noise_kind_from_name(const std::string& name);

// Entrywise-independent (up to symmetry) noise description. K and the
// second moment resolve from the kind when left at 0: the drawn entries
// always satisfy |e| <= K and E[e^2] <= second_moment, with
// second_moment <= K^2. Completion sampling can additionally violate
// E[e^2] <= K when the signal amplitude is large; assumption_k_ok reports
// that separately instead of refusing to construct.
struct noise_spec {
    noise_kind kind = noise_kind::rademacher;
    double scale = 1.0;
    double k_bound = 0.0;        // 0 = kind default
    double second_moment = 0.0;  // 0 = kind default
    double p = 0.5;              // edge / sampling density
    partition_spec part;         // partition_edge only
    std::uint64_t seed = 0;

    void validate(int n) const;
    double resolved_k(int n) const;
    double resolved_second_moment(int n) const;

    // For completion sampling the resolved values depend on the signal
    // amplitude; amp = max|A_ij| (plus the corruption bound when present).
    double completion_k(double amp) const;
    double completion_second_moment(double amp) const;
    bool assumption_k_ok(double amp) const {
        return completion_second_moment(amp) <= completion_k(amp);
    }
};

// Symmetric noise draw, a pure function of (seed, trial, entry).
sym_matrix draw_noise(const noise_spec& s, int n, std::uint32_t trial = 0);

// Completion sampling noise for a known signal: e = a(1/p - 1) with
// probability p, else -a, entrywise independent (not symmetric).
rect_matrix draw_completion_noise(const noise_spec& s, const rect_matrix& a, std::uint32_t trial = 0);

struct clique_instance {
    sym_matrix a;      // all-ones block on the member set, zero elsewhere
    index_set members; // recorded placement
};

// Rank-one clique signal: k x k all-ones block (diagonal included) at a
// uniformly random k-subset.
clique_instance clique_signal(int n, int k, std::uint64_t seed, std::uint32_t trial = 0);

struct partition_instance {
    sym_matrix a;            // block-diagonal expected transformed adjacency
    std::vector<int> labels; // vertex -> block
};

partition_instance partition_signal(const partition_spec& spec);

// Integer-valued block-constant rectangular signal: values(bi, bj) fills the
// (bi, bj) block of the row/column partition.
rect_matrix integer_block_signal(int m, int n, const std::vector<int>& block_rows,
                                 const std::vector<int>& block_cols, const rect_matrix& values);

// Edge indicators to spectral form: edges stay 1, non-edges become
// -q/(1 - q) (zero mean under the null), diagonal mapped as a non-edge.
sym_matrix adjacency_transform(const sym_matrix& adj, double q);

struct planted_graph {
    sym_matrix adjacency;    // 0/1, zero diagonal
    std::vector<int> labels; // vertex -> block (clique graphs: block 0)
    partition_spec part;
};

// Clique on a random k-subset, background G(n, q).
planted_graph sample_clique_graph(int n, int k, double q, std::uint64_t seed,
                                  std::uint32_t trial = 0);

// Blocks of density p_i, cross edges of density q, contiguous labels.
planted_graph sample_partition_graph(const partition_spec& spec, std::uint64_t seed,
                                     std::uint32_t trial = 0);

// Everything the perturbation bounds consume about a signal, precomputed
// once per instance. sigma has r+1 entries (the trailing one is the first
// discarded value, 0 past the spectrum end); gaps, minima and condition
// numbers are 1-based via accessors.
struct signal_summary {
    int n = 0; // ambient dimension (rows + cols for rectangular signals)
    int r = 0;
    std::vector<double> sigma;      // sigma_1 .. sigma_{r+1}
    std::vector<double> gap;        // Delta_i = sigma_i - sigma_{i+1}, i = 1..r
    std::vector<double> delta;      // delta_i = min(Delta_{i-1}, Delta_i), Delta_0 = inf
    std::vector<double> kappa;      // kappa_i = sigma_1 / sigma_i
    std::vector<bool> degenerate;   // gap below the decomposition's resolution
    double u_inf = 0.0;             // max |entry| over the r leading vectors
    double top_inf = 0.0;           // rectangular: max over the row-side block
    double bottom_inf = 0.0;        // rectangular: max over the column-side block

    double sigma_at(int i) const;   // 1-based, i in [1, r+1]
    double gap_at(int i) const;
    double delta_at(int i) const;
    double kappa_at(int i) const;
    bool degenerate_at(int i) const;
};

signal_summary summarize_signal(const spectral_decomposition& d, int r);

// Summary of the rectangular signal behind a symmetrized decomposition:
// sigma are the positive-sign values, u_inf is the max entry of [U, V]
// (sqrt(2) times the eigenvector entries), n reports rows + cols.
signal_summary summarize_rect_signal(const spectral_decomposition& d, int r, int rows, int cols);

} // namespace svp
