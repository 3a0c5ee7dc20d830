#include "svp/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace svp {

namespace {

// One core in this environment; oversubscribed BLAS threads only add
// nondeterministic reduction orders.
struct blas_init {
    blas_init() { openblas_set_num_threads(1); }
};
const blas_init blas_init_once{};

void canonicalize_sign(double* v, int n) {
    int arg = 0;
    double best = std::fabs(v[0]);
    for (int l = 1; l < n; ++l) {
        double a = std::fabs(v[l]);
        if (a > best) {
            best = a;
            arg = l;
        }
    }
    if (v[arg] < 0.0)
        for (int l = 0; l < n; ++l) v[l] = -v[l];
}

std::vector<double> eigenvalues_ascending(const sym_matrix& m) {
    int n = m.n();
    std::vector<double> a(m.data(), m.data() + static_cast<size_t>(n) * n);
    std::vector<double> w(n);
    lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    require(info <= 0, errc::no_convergence, "eigenvalue iteration failed to converge");
    require(info == 0, errc::bad_size, "internal eigensolver argument error");
    return w;
}

} // namespace

spectral_decomposition::spectral_decomposition(int n, std::vector<double> sigma, std::vector<int> sign,
                                               std::vector<double> vectors, double rank_tol)
    : n_(n), rank_tol_(rank_tol), sigma_(std::move(sigma)), sign_(std::move(sign)),
      vectors_(std::move(vectors)) {
    require(static_cast<int>(sigma_.size()) == n_ && static_cast<int>(sign_.size()) == n_ &&
                vectors_.size() == static_cast<size_t>(n_) * n_,
            errc::length_mismatch, "decomposition pieces disagree on n");
    rank_ = 0;
    while (rank_ < n_ && sigma_[rank_] > rank_tol_) ++rank_;
}

double spectral_decomposition::sigma_at(int i) const {
    require(i >= 1 && i <= n_, errc::index_out_of_range, "singular index " + std::to_string(i));
    return sigma_[i - 1];
}

int spectral_decomposition::sign_at(int i) const {
    require(i >= 1 && i <= n_, errc::index_out_of_range, "singular index " + std::to_string(i));
    return sign_[i - 1];
}

const double* spectral_decomposition::vector(int i) const {
    require(i >= 1 && i <= n_, errc::index_out_of_range, "singular index " + std::to_string(i));
    return vectors_.data() + static_cast<size_t>(i - 1) * n_;
}

double spectral_decomposition::entry(int i, int l) const {
    require(l >= 0 && l < n_, errc::index_out_of_range, "coordinate " + std::to_string(l));
    return vector(i)[l];
}

std::vector<double> spectral_decomposition::vector_copy(int i) const {
    const double* v = vector(i);
    return std::vector<double>(v, v + n_);
}

spectral_decomposition spectral_decompose(const sym_matrix& m, double rank_tol_rel) {
    require(rank_tol_rel >= 0.0, errc::non_positive_input, "rank tolerance must be >= 0");
    int n = m.n();
    std::vector<double> a(m.data(), m.data() + static_cast<size_t>(n) * n);

    // Unreachable through sym_matrix construction; guards hand-built buffers.
    double scale = m.max_abs();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = std::fabs(a[static_cast<size_t>(j) * n + i] - a[static_cast<size_t>(i) * n + j]);
            require(d <= 1e-12 * std::max(1.0, scale), errc::non_symmetric,
                    "asymmetry above relative 1e-12");
        }

    std::vector<double> w(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    require(info <= 0, errc::no_convergence, "eigenvalue iteration failed to converge");
    require(info == 0, errc::bad_size, "internal eigensolver argument error");

    // Order by |lambda| descending; exact ties put + before -, then keep the
    // backend's ascending-eigenvalue order.
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int x, int y) {
        double ax = std::fabs(w[x]), ay = std::fabs(w[y]);
        if (ax != ay) return ax > ay;
        return (w[x] >= 0.0) && (w[y] < 0.0);
    });

    std::vector<double> sigma(n);
    std::vector<int> sign(n);
    std::vector<double> vectors(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        int src = ord[i];
        sigma[i] = std::fabs(w[src]);
        sign[i] = w[src] >= 0.0 ? 1 : -1;
        double* dst = vectors.data() + static_cast<size_t>(i) * n;
        std::copy_n(a.data() + static_cast<size_t>(src) * n, n, dst);
        canonicalize_sign(dst, n);
    }

    double tol = rank_tol_rel * (n > 0 ? sigma[0] : 0.0);
    return spectral_decomposition(n, std::move(sigma), std::move(sign), std::move(vectors), tol);
}

std::vector<double> singular_values(const sym_matrix& m) {
    std::vector<double> w = eigenvalues_ascending(m);
    for (double& v : w) v = std::fabs(v);
    std::sort(w.begin(), w.end(), std::greater<double>());
    return w;
}

double spectral_norm(const sym_matrix& m) {
    std::vector<double> w = eigenvalues_ascending(m);
    double lo = std::fabs(w.front()), hi = std::fabs(w.back());
    return std::max(lo, hi);
}

std::vector<double> align_sign(const std::vector<double>& reference, std::vector<double> candidate) {
    require(reference.size() == candidate.size(), errc::length_mismatch,
            "align_sign vectors differ in length");
    double ip = 0.0;
    for (size_t l = 0; l < reference.size(); ++l) ip += reference[l] * candidate[l];
    if (ip < 0.0)
        for (double& v : candidate) v = -v;
    return candidate;
}

sym_matrix symmetrize(const rect_matrix& a) {
    int m = a.rows(), n = a.cols();
    sym_matrix s(m + n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) s.set(i, m + j, a(i, j));
    return s;
}

sym_matrix zero_out(const sym_matrix& m, const index_set& alpha) {
    require(alpha.universe() == m.n(), errc::universe_mismatch,
            "index set universe differs from matrix size");
    sym_matrix out = m;
    for (int l : alpha.ids()) {
        for (int j = 0; j < m.n(); ++j) out.set(l, j, 0.0);
    }
    return out;
}

std::vector<double> leave_one_out_vector(const sym_matrix& h, int l) {
    require(l >= 0 && l < h.n(), errc::index_out_of_range, "coordinate " + std::to_string(l));
    std::vector<double> x(h.n());
    for (int j = 0; j < h.n(); ++j) x[j] = h(l, j);
    x[l] *= 0.5;
    return x;
}

sym_matrix low_rank_truncate(const spectral_decomposition& d, int s) {
    require(s >= 0 && s <= d.n(), errc::rank_exceeded,
            "truncation rank " + std::to_string(s) + " outside [0, " + std::to_string(d.n()) + "]");
    int n = d.n();
    sym_matrix out(n);
    for (int i = 1; i <= s; ++i) {
        double signed_sigma = d.sign_at(i) * d.sigma_at(i);
        const double* u = d.vector(i);
        for (int c = 0; c < n; ++c) {
            double w = signed_sigma * u[c];
            for (int r = c; r < n; ++r) out.add(r, c, w * u[r]);
        }
    }
    return out;
}

rect_matrix low_rank_truncate_rect(const spectral_decomposition& d, int s, int rows, int cols) {
    require(rows + cols == d.n(), errc::shape_mismatch,
            "rows+cols must match the symmetrized dimension");
    require(s >= 0, errc::rank_exceeded, "truncation rank must be >= 0");
    rect_matrix out(rows, cols);
    int kept = 0;
    for (int i = 1; i <= d.n() && kept < s; ++i) {
        if (d.sign_at(i) != 1 || d.sigma_at(i) <= d.rank_tol()) continue;
        ++kept;
        // Unit eigenvector (u; v)/sqrt(2) of the symmetrization: the
        // singular contribution sigma u v^T equals 2 sigma w_top w_bot^T.
        double two_sigma = 2.0 * d.sigma_at(i);
        const double* w = d.vector(i);
        for (int j = 0; j < cols; ++j) {
            double wj = two_sigma * w[rows + j];
            for (int r = 0; r < rows; ++r) out(r, j) += w[r] * wj;
        }
    }
    require(kept == s, errc::rank_exceeded,
            "requested rank " + std::to_string(s) + " but only " + std::to_string(kept) +
                " positive triples above tolerance");
    return out;
}

std::vector<double> rect_singular_values(const spectral_decomposition& d) {
    std::vector<double> out;
    for (int i = 1; i <= d.n(); ++i)
        if (d.sign_at(i) == 1) out.push_back(d.sigma_at(i));
    // Already descending within the positive subsequence.
    return out;
}

vector_distance vector_metrics(const std::vector<double>& u, const std::vector<double>& v) {
    require(u.size() == v.size() && !u.empty(), errc::length_mismatch,
            "vector_metrics needs equal nonzero lengths");
    std::vector<double> w = align_sign(u, v);
    double s2 = 0.0, si = 0.0;
    for (size_t l = 0; l < u.size(); ++l) {
        double d = w[l] - u[l];
        s2 += d * d;
        si = std::max(si, std::fabs(d));
    }
    return {std::sqrt(s2), si};
}

} // namespace svp
