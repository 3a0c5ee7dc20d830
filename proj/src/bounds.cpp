#include "svp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace svp {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

double log_n(int n) { return std::log(static_cast<double>(std::max(n, 2))); }

} // namespace

bound_value bound_value::flagged() { return {nan_v, false}; }

namespace constants {

double coordinate_c0(int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    return 272.0 * 4.0 * std::pow(static_cast<double>(r), 1.5);
}

double coordinate_inner_c(int r) { return 256.0 * r; }

double delocalization_c1(int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    return 2500.0 * std::pow(static_cast<double>(r), 1.5);
}

double row_growth_c(int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    return 1000.0 * std::pow(9.0, 2.0 * r);
}

double linf_main_c(double c0, int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    return 2048.0 * (c0 + 1.0) * std::pow(static_cast<double>(r), 3.0);
}

double linf_refined_c(double c0, int r) { return 64.0 * linf_main_c(c0, r); }

double linf_main_rect_c(double c0, int r) { return 2.0 * linf_main_c(c0, r); }

double linf_refined_rect_c(double c0, int r) { return 2.0 * linf_refined_c(c0, r); }

double completion_c(double amp_root, int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    double a = std::max(amp_root, 2.0);
    return (a + 1.0) * 262144.0 * 7.0 * std::pow(static_cast<double>(r), 3.0);
}

double completion_stability_c(int r) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    return 262144.0 * 7.0 * std::pow(static_cast<double>(r), 3.0);
}

} // namespace constants

double eps1(const signal_summary& s, int i, double norm_e) {
    require(norm_e >= 0.0, errc::non_positive_input, "||E|| must be >= 0");
    return norm_e / s.sigma_at(i);
}

double eps2(const signal_summary& s, int i) {
    double d = s.delta_at(i);
    return d > 0.0 ? 1.0 / d : inf;
}

bound_value davis_kahan(double norm_e, double delta_i, double C) {
    if (norm_e < 0.0 || delta_i <= 0.0 || C <= 0.0) return bound_value::flagged();
    if (delta_i < 2.0 * norm_e) return bound_value::flagged();
    return bound_value::of(C * norm_e / delta_i);
}

double ovw_l2(double K, int r, double delta_1, double sigma_1, double norm_e, double C0) {
    require(r >= 1, errc::non_positive_input, "rank must be >= 1");
    require(K >= 0.0 && norm_e >= 0.0, errc::non_positive_input,
            "K and ||E|| must be >= 0");
    require(delta_1 > 0.0 && sigma_1 > 0.0 && C0 > 0.0, errc::non_positive_input,
            "delta_1, sigma_1 and C0 must be positive");
    return C0 * (K * std::sqrt(static_cast<double>(r)) / delta_1 + norm_e / sigma_1 +
                 norm_e * norm_e / (delta_1 * sigma_1));
}

namespace {

// Shared head of the coordinatewise bounds:
// c side_inf (kappa_i l2 + eps1 + kappa_i eps2 K sqrt(log n)).
bool linf_inputs_ok(const signal_summary& s, int i, double l2_err, double norm_e, double K,
                    double c) {
    if (i < 1 || i > s.r) fail(errc::rank_exceeded, "component " + std::to_string(i) +
                                                        " outside summary rank " + std::to_string(s.r));
    return !(s.degenerate_at(i) || l2_err < 0.0 || norm_e < 0.0 || K < 0.0 || c <= 0.0 ||
             s.delta_at(i) <= 0.0);
}

double linf_head(const signal_summary& s, int i, double l2_err, double norm_e, double K, double c,
                 double side_inf) {
    double root_log = std::sqrt(log_n(s.n));
    return c * side_inf *
           (s.kappa_at(i) * l2_err + eps1(s, i, norm_e) + s.kappa_at(i) * eps2(s, i) * K * root_log);
}

} // namespace

bound_value linf_main(const signal_summary& s, int i, double l2_err, double norm_e, double K,
                      double c, double side_inf) {
    if (!linf_inputs_ok(s, i, l2_err, norm_e, K, c)) return bound_value::flagged();
    double si = side_inf > 0.0 ? side_inf : s.u_inf;
    double tail = c * K * std::sqrt(log_n(s.n)) / s.sigma_at(i);
    return bound_value::of(linf_head(s, i, l2_err, norm_e, K, c, si) + tail);
}

bound_value linf_refined(const signal_summary& s, int i, double l2_err, double norm_e, double K,
                         double c, double side_inf) {
    if (!linf_inputs_ok(s, i, l2_err, norm_e, K, c)) return bound_value::flagged();
    double si = side_inf > 0.0 ? side_inf : s.u_inf;
    double tail = c * std::sqrt(K * static_cast<double>(s.n)) * s.kappa_at(i) * s.u_inf *
                  log_n(s.n) / s.sigma_at(i);
    return bound_value::of(linf_head(s, i, l2_err, norm_e, K, c, si) + tail);
}

coordinate_evaluator::coordinate_evaluator(sym_matrix a, sym_matrix h, int r, double c0_scale,
                                           double slack_abs, double slack_rel)
    : a_(std::move(a)), h_(std::move(h)), r_(r), c0_scale_(c0_scale), slack_abs_(slack_abs),
      slack_rel_(slack_rel), norm_h_(spectral_norm(h_)), da_(spectral_decompose(a_)),
      dat_(spectral_decompose(a_ + h_)), summary_(summarize_signal(da_, r)) {
    require(a_.n() == h_.n(), errc::shape_mismatch, "signal and perturbation sizes differ");
    require(c0_scale > 0.0, errc::non_positive_input, "constant scale must be positive");
}

std::vector<coordinate_report> coordinate_evaluator::evaluate_column(
    int l, const std::vector<int>& indices) const {
    int n = a_.n();
    require(l >= 0 && l < n, errc::index_out_of_range, "coordinate " + std::to_string(l));

    sym_matrix al = a_ + zero_out(h_, index_set({l}, n));
    spectral_decomposition dl = spectral_decompose(al);
    std::vector<double> x = leave_one_out_vector(h_, l);

    // ||U^{l T} x|| over the r leading components of the leave-one-out matrix.
    double al_sq = 0.0;
    for (int j = 1; j <= r_; ++j) {
        const double* u = dl.vector(j);
        double ip = 0.0;
        for (int t = 0; t < n; ++t) ip += u[t] * x[t];
        al_sq += ip * ip;
    }
    double a_l = std::sqrt(al_sq);

    double row_inf = 0.0;
    for (int j = 1; j <= r_; ++j) row_inf = std::max(row_inf, std::fabs(da_.entry(j, l)));

    double c0 = c0_scale_ * constants::coordinate_c0(r_);
    double ci = c0_scale_ * constants::coordinate_inner_c(r_);

    std::vector<coordinate_report> out;
    out.reserve(indices.size());
    for (int i : indices) {
        require(i >= 1 && i <= r_, errc::rank_exceeded,
                "component " + std::to_string(i) + " outside rank " + std::to_string(r_));
        coordinate_report rep;
        rep.i = i;
        rep.l = l;
        rep.al = a_l;

        double sigma_i = summary_.sigma_at(i);
        double delta_i = summary_.delta_at(i);
        double kappa_i = summary_.kappa_at(i);

        const double* ui = da_.vector(i);
        std::vector<double> ut = align_sign(da_.vector_copy(i), dat_.vector_copy(i));
        double l2 = 0.0;
        for (int t = 0; t < n; ++t) {
            double d = ut[t] - ui[t];
            l2 += d * d;
        }
        rep.l2_err = std::sqrt(l2);
        rep.lhs = std::fabs(ut[l] - ui[l]);

        const double* uli = dl.vector(i);
        double ip = 0.0;
        for (int t = 0; t < n; ++t) ip += uli[t] * x[t];
        rep.inner = std::fabs(ip);

        // Assumptions, strict. Neighbor values below index 1 are +inf; the
        // upper neighbor always exists in the full spectrum of a + h^{l}.
        rep.margin1 = sigma_i / (c0 * norm_h_);
        rep.a1 = sigma_i > c0 * norm_h_;

        double rhs2 = c0 * std::max(a_l, kappa_i * norm_h_ * summary_.u_inf);
        rep.margin2 = delta_i / rhs2;
        rep.a2 = delta_i > rhs2;

        double sigma_tilde_i = dat_.sigma_at(i);
        double up = i + 1 <= n ? std::fabs(sigma_tilde_i - dl.sigma_at(i + 1)) : inf;
        double down = i >= 2 ? std::fabs(sigma_tilde_i - dl.sigma_at(i - 1)) : inf;
        double sep = std::min(up, down);
        rep.margin3 = sep / (delta_i / 2.0);
        rep.a3 = sep > delta_i / 2.0;

        rep.assumptions_ok = rep.a1 && rep.a2 && rep.a3;

        rep.bound = c0 * row_inf *
                        (kappa_i * rep.l2_err + eps1(summary_, i, norm_h_) +
                         rep.al * kappa_i * eps2(summary_, i)) +
                    ci * rep.inner / sigma_i;
        rep.holds = rep.lhs <= rep.bound + slack_abs_ + slack_rel_ * rep.bound;
        out.push_back(rep);
    }
    return out;
}

coordinate_report coordinate_evaluator::evaluate(int i, int l) const {
    return evaluate_column(l, {i}).front();
}

t_estimate estimate_T(const noise_spec& spec, int n, double tau, int trials, t_mode mode,
                      double c_bvh, double amp) {
    require(tau > 0.0 && tau < 1.0, errc::bad_spec, "tau must lie in (0, 1)");
    require(n >= 1, errc::bad_size, "dimension must be >= 1");

    if (mode == t_mode::analytic) {
        double m2 = spec.kind == noise_kind::completion_sampling ? spec.completion_second_moment(amp)
                                                                 : spec.resolved_second_moment(n);
        double K = spec.kind == noise_kind::completion_sampling ? spec.completion_k(amp)
                                                                : spec.resolved_k(n);
        require(c_bvh > 0.0, errc::non_positive_input, "c_bvh must be positive");
        double T = 4.0 * std::sqrt(static_cast<double>(n) * m2) +
                   K * std::sqrt(4.0 * c_bvh * log_n(n));
        return {T, mode, 0};
    }
    if (mode == t_mode::analytic_completion) {
        require(spec.kind == noise_kind::completion_sampling, errc::bad_spec,
                "completion estimate needs a completion spec");
        require(amp > 0.0, errc::non_positive_input, "signal amplitude must be positive");
        double T = 4.0 * std::sqrt(amp) * std::sqrt(static_cast<double>(n) / spec.p);
        return {T, mode, 0};
    }

    require(spec.kind != noise_kind::completion_sampling, errc::bad_spec,
            "Monte Carlo T estimation draws square noise; completion uses the analytic modes");
    int needed = static_cast<int>(std::ceil(10.0 / tau));
    require(trials >= needed, errc::too_few_trials,
            "need >= " + std::to_string(needed) + " trials at tau = " + std::to_string(tau));
    std::vector<double> norms(trials);
    for (int t = 0; t < trials; ++t)
        norms[t] = spectral_norm(draw_noise(spec, n, static_cast<std::uint32_t>(t)));
    std::sort(norms.begin(), norms.end(), std::greater<double>());
    int k = static_cast<int>(std::floor(tau * trials));
    return {norms[k], mode, trials};
}

stability_report stability_check(const signal_summary& s, int i, double T, double K, double c,
                                 double nu) {
    require(T >= 0.0 && K > 0.0 && c > 0.0, errc::non_positive_input,
            "stability needs T >= 0, K > 0, c > 0");
    require(nu >= 0.0, errc::non_positive_input, "nu must be >= 0");
    stability_report rep;
    rep.T = T;

    double sigma_i = s.sigma_at(i);
    double delta_i = s.delta_at(i);
    double kappa_i = s.kappa_at(i);
    double ln = log_n(s.n);

    double rhs_a = c * T;
    rep.margin_a = sigma_i / rhs_a;
    rep.cond_a = sigma_i > rhs_a;

    double rhs_b = c * (K * std::pow(ln, nu / 2.0) + T * T / sigma_i);
    rep.margin_b = delta_i / rhs_b;
    rep.cond_b = delta_i > rhs_b;

    double rhs_c = c * kappa_i * T * s.u_inf;
    rep.margin_c = rhs_c > 0.0 ? delta_i / rhs_c : inf;
    rep.cond_c = delta_i > rhs_c;

    double rhs_s = c * std::sqrt(K * static_cast<double>(s.n)) * std::pow(ln, nu + 0.01);
    rep.margin_strong = sigma_i / rhs_s;
    rep.cond_strong = sigma_i > rhs_s;

    if (!(rep.cond_a && rep.cond_b && rep.cond_c))
        rep.verdict = "unstable";
    else
        rep.verdict = rep.cond_strong ? "strongly_stable" : "stable";
    return rep;
}

singular_tail singular_tail_bound(int k, int r, double K, double t, double norm_e,
                                  double sigma_tilde_k) {
    require(k >= 1 && r >= 1, errc::non_positive_input, "indices must be >= 1");
    require(K > 0.0, errc::non_positive_input, "K must be positive");
    require(t >= 0.0 && norm_e >= 0.0, errc::non_positive_input, "t and ||E|| must be >= 0");

    const double log9 = std::log(9.0);
    double denom = 128.0 * K * K;
    singular_tail out;
    out.lower_prob = std::exp(std::log(4.0) + k * log9 - t * t / denom);
    out.upper_prob = std::exp(std::log(4.0) + 2.0 * r * log9 - r * t * t / denom);
    out.two_sided_prob = std::exp(std::log(8.0) + 2.0 * r * log9 - t * t / denom);

    double e2 = norm_e * norm_e;
    double drift1 = sigma_tilde_k > 0.0 ? e2 / sigma_tilde_k : (e2 > 0.0 ? inf : 0.0);
    double drift2 =
        sigma_tilde_k > 0.0 ? e2 * norm_e / (sigma_tilde_k * sigma_tilde_k) : (e2 > 0.0 ? inf : 0.0);
    out.upper_radius = t * std::sqrt(static_cast<double>(r)) +
                       2.0 * std::sqrt(static_cast<double>(k)) * drift1 + k * drift2;
    out.two_sided_radius = 2.0 * r * (t + drift1 + drift2);
    return out;
}

double hoeffding_tail(double t, double sum_sq_ranges) {
    require(t >= 0.0, errc::non_positive_input, "t must be >= 0");
    require(sum_sq_ranges > 0.0, errc::non_positive_input, "range sum must be positive");
    return std::exp(std::log(2.0) - 2.0 * t * t / sum_sq_ranges);
}

double inner_product_tail(double C, int n) {
    require(C >= 0.0, errc::non_positive_input, "C must be >= 0");
    require(n >= 2, errc::bad_size, "n must be >= 2");
    return std::exp(std::log(2.0) - (C * C / 2.0) * std::log(static_cast<double>(n)));
}

double bernstein_tail(double t, double variance_sum, double K) {
    require(t >= 0.0, errc::non_positive_input, "t must be >= 0");
    require(variance_sum > 0.0 && K > 0.0, errc::non_positive_input,
            "variance sum and K must be positive");
    return std::exp(std::log(2.0) - (t * t / 2.0) / (variance_sum + K * t / 3.0));
}

double operator_norm_tail(double t, double v, double K, int n, double c_bvh) {
    require(t >= 0.0 && v >= 0.0, errc::non_positive_input, "t and v must be >= 0");
    require(K > 0.0 && c_bvh > 0.0, errc::non_positive_input, "K and c_bvh must be positive");
    require(n >= 1, errc::bad_size, "n must be >= 1");
    return std::exp(std::log(static_cast<double>(n)) - t * t / (c_bvh * K * K));
}

} // namespace svp
