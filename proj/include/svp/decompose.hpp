#pragma once

#include <vector>

#include "svp/matrix.hpp"

namespace svp {

// Eigendecomposition of a symmetric matrix, reported as singular triples:
// sigma[i] = |lambda| in descending order, sign[i] = sign(lambda) with +1
// preferred on exact |lambda| ties, vector i canonicalized so its
// largest-magnitude entry (lowest index on ties) is positive. rank_tol is
// the resolved absolute threshold (relative tolerance times sigma[0]).
class spectral_decomposition {
public:
    spectral_decomposition(int n, std::vector<double> sigma, std::vector<int> sign,
                           std::vector<double> vectors, double rank_tol);

    int n() const noexcept { return n_; }
    int rank() const noexcept { return rank_; }
    double rank_tol() const noexcept { return rank_tol_; }

    const std::vector<double>& sigma() const noexcept { return sigma_; }
    const std::vector<int>& sign() const noexcept { return sign_; }

    double sigma_at(int i) const;                  // 1-based
    int sign_at(int i) const;                      // 1-based
    const double* vector(int i) const;             // 1-based, length n
    double entry(int i, int l) const;              // u_i[l], i 1-based, l 0-based
    std::vector<double> vector_copy(int i) const;  // 1-based

private:
    int n_ = 0;
    int rank_ = 0;
    double rank_tol_ = 0.0;
    std::vector<double> sigma_;
    std::vector<int> sign_;
    std::vector<double> vectors_; // n x n column-major, column i-1 = u_i
};

// Full symmetric eigendecomposition. rank_tol_rel scales by the largest
// singular value to get the absolute rank cutoff. Throws NonSymmetric if fed
// a matrix whose asymmetry exceeds 1e-12 relative (unreachable through
// sym_matrix, checked for defense), NoConvergence if the backend fails.
spectral_decomposition spectral_decompose(const sym_matrix& m, double rank_tol_rel = 1e-10);

// Values-only fast paths (no eigenvectors).
std::vector<double> singular_values(const sym_matrix& m); // |lambda| descending
double spectral_norm(const sym_matrix& m);

// Flips candidate so <reference, candidate> >= 0. An exactly-zero inner
// product leaves the candidate unchanged.
std::vector<double> align_sign(const std::vector<double>& reference, std::vector<double> candidate);

// Rectangular a embedded as [[0, a], [a^T, 0]], size (rows+cols)^2. Its
// spectrum is +/- each singular value of a; unit eigenvectors are
// (u; v)/sqrt(2) for singular pairs (u, v).
sym_matrix symmetrize(const rect_matrix& a);

// Copy with the rows and columns in alpha set to zero.
sym_matrix zero_out(const sym_matrix& m, const index_set& alpha);

// Row l of h with the diagonal entry halved: the vector x with
// h - zero_out(h, {l}) == x e_l^T + e_l x^T exactly.
std::vector<double> leave_one_out_vector(const sym_matrix& h, int l);

// Sum of the s leading triples sign_i sigma_i u_i u_i^T. s = 0 gives the
// zero matrix; s > n raises RankExceeded.
sym_matrix low_rank_truncate(const spectral_decomposition& d, int s);

// Rank-s truncated SVD of the rectangular matrix that d symmetrized:
// walks triples in order, keeps the positive-sign ones (one per singular
// pair), adds sigma * u v^T reconstructed from the paired eigenvector.
rect_matrix low_rank_truncate_rect(const spectral_decomposition& d, int s, int rows, int cols);

// Singular values of the original rectangular matrix, read off a
// decomposition of its symmetrization (positive-sign triples, descending).
std::vector<double> rect_singular_values(const spectral_decomposition& d);

struct vector_distance {
    double l2 = 0.0;
    double linf = 0.0;
};

// Distance between unit vectors up to sign: v is aligned to u first.
vector_distance vector_metrics(const std::vector<double>& u, const std::vector<double>& v);

} // namespace svp
