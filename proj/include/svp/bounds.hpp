#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svp/models.hpp"

namespace svp {

// Numeric preconditions on bound evaluations never throw: a failed
// precondition comes back as ok == false with value NaN, so sweeps stay
// rectangular and the caller decides what a gap means.
struct bound_value {
    double value = 0.0;
    bool ok = false;

    static bound_value of(double v) { return {v, true}; }
    static bound_value flagged();
};

// Theorem constants, parameterized by the effective rank. c0 is the free
// multiplier the probability statements carry around; calibrated runs
// replace these wholesale.
namespace constants {

double coordinate_c0(int r);                   // 1088 r^{3/2}
double coordinate_inner_c(int r);              // 256 r
double delocalization_c1(int r);               // 2500 r^{3/2}
double row_growth_c(int r);                    // 1000 * 9^{2r}
double linf_main_c(double c0, int r);          // 2^11 (c0+1) r^3
double linf_refined_c(double c0, int r);       // 2^17 (c0+1) r^3
double linf_main_rect_c(double c0, int r);     // 2^12 (c0+1) r^3
double linf_refined_rect_c(double c0, int r);  // 2^18 (c0+1) r^3
double completion_c(double amp_root, int r);   // (a+1) 2^18 7 r^3, a = max(sqrt(amp), 2)
double completion_stability_c(int r);          // 2^18 7 r^3

} // namespace constants

// eps1 = ||E|| / sigma_i, eps2 = 1 / delta_i.
double eps1(const signal_summary& s, int i, double norm_e);
double eps2(const signal_summary& s, int i);

// Classical subspace bound C ||E|| / delta_i, valid when delta_i >= 2||E||.
bound_value davis_kahan(double norm_e, double delta_i, double C = 1.0);

// l2 eigenvector bound C0 (K sqrt(r)/delta_1 + ||E||/sigma_1 +
// ||E||^2/(delta_1 sigma_1)). Zero noise gives zero; nonpositive structural
// inputs throw NonPositiveInput.
double ovw_l2(double K, int r, double delta_1, double sigma_1, double norm_e, double C0 = 1.0);

// Coordinatewise bounds on |tilde u_i - u_i|_inf, natural-log flavor:
//   main:    c u_inf (kappa_i l2 + eps1 + kappa_i eps2 K sqrt(log n)) + c K sqrt(log n) / sigma_i
//   refined: same head, tail replaced by c sqrt(K n) kappa_i u_inf log n / sigma_i
// side_inf lets rectangular callers pass the relevant block's sup-norm;
// 0 means use summary.u_inf. Degenerate gaps come back flagged.
bound_value linf_main(const signal_summary& s, int i, double l2_err, double norm_e, double K,
                      double c, double side_inf = 0.0);
bound_value linf_refined(const signal_summary& s, int i, double l2_err, double norm_e, double K,
                         double c, double side_inf = 0.0);

// Deterministic coordinatewise theorem. All inputs are matrices; the
// evaluator owns the decompositions of the signal a, the perturbed a + h,
// and (per coordinate) the leave-one-out a + h^{l}, and reports assumption
// truth alongside both sides of the bound.
struct coordinate_report {
    int i = 0; // singular index, 1-based
    int l = 0; // coordinate, 0-based
    bool a1 = false, a2 = false, a3 = false;
    bool assumptions_ok = false;
    double margin1 = 0.0, margin2 = 0.0, margin3 = 0.0; // lhs/rhs of each assumption
    double lhs = 0.0;    // |tilde u_i(l) - u_i(l)| after sign alignment
    double bound = 0.0;  // theorem right-hand side
    double al = 0.0;     // ||U^{l T} x||
    double inner = 0.0;  // |<u_i^{l}, x>|
    double l2_err = 0.0; // ||tilde u_i - u_i||
    bool holds = false;  // lhs <= bound + slack
};

class coordinate_evaluator {
public:
    // r leading components are in play; c0_scale rescales the theorem
    // constant (1 = as stated).
    coordinate_evaluator(sym_matrix a, sym_matrix h, int r, double c0_scale = 1.0,
                         double slack_abs = 1e-9, double slack_rel = 1e-9);

    const signal_summary& summary() const noexcept { return summary_; }
    double norm_h() const noexcept { return norm_h_; }
    const spectral_decomposition& signal_decomposition() const noexcept { return da_; }
    const spectral_decomposition& perturbed_decomposition() const noexcept { return dat_; }

    // One leave-one-out solve covers every index at that coordinate.
    std::vector<coordinate_report> evaluate_column(int l, const std::vector<int>& indices) const;
    coordinate_report evaluate(int i, int l) const;

private:
    sym_matrix a_, h_;
    int r_;
    double c0_scale_, slack_abs_, slack_rel_;
    double norm_h_;
    spectral_decomposition da_, dat_;
    signal_summary summary_;
};

// Noise-level proxy T = inf{t : P(||E|| > t) <= tau}.
enum class t_mode { monte_carlo, analytic, analytic_completion };

struct t_estimate {
    double T = 0.0;
    t_mode mode = t_mode::monte_carlo;
    int trials = 0;
};

// Monte Carlo mode needs trials >= ceil(10 / tau) (TooFewTrials otherwise)
// and reports the empirical (1 - tau)-quantile of ||E|| over fresh trials.
// Analytic mode: 4 sqrt(n m2) + K sqrt(4 c_bvh log n). Completion mode:
// 4 sqrt(amp) sqrt(N / p); amp is the entrywise signal amplitude.
t_estimate estimate_T(const noise_spec& spec, int n, double tau, int trials,
                      t_mode mode = t_mode::monte_carlo, double c_bvh = 1.0, double amp = 0.0);

// Spectral stability of component i at noise level T:
//   (a) sigma_i > c T
//   (b) delta_i > c (K log^{nu/2} n + T^2 / sigma_i)
//   (c) delta_i > c kappa_i T u_inf
//   strong: sigma_i > c sqrt(K n) log^{nu + 0.01} n
struct stability_report {
    double T = 0.0;
    bool cond_a = false, cond_b = false, cond_c = false, cond_strong = false;
    double margin_a = 0.0, margin_b = 0.0, margin_c = 0.0, margin_strong = 0.0;
    std::string verdict; // unstable | stable | strongly_stable
};

stability_report stability_check(const signal_summary& s, int i, double T, double K, double c,
                                 double nu);

// Tail package for the k-th perturbed singular value.
struct singular_tail {
    double lower_prob = 0.0;      // P{tilde sigma_k < sigma_k - t} bound
    double upper_radius = 0.0;    // t sqrt(r) + 2 sqrt(k) ||E||^2/ts + k ||E||^3/ts^2
    double upper_prob = 0.0;
    double two_sided_radius = 0.0;
    double two_sided_prob = 0.0;
};

singular_tail singular_tail_bound(int k, int r, double K, double t, double norm_e,
                                  double sigma_tilde_k);

// Scalar concentration helpers. These return the raw formula values,
// computed in log space; a value above 1 is a vacuous bound, not an error.
double hoeffding_tail(double t, double sum_sq_ranges);
double inner_product_tail(double C, int n);    // 2 n^{-C^2/2}
double bernstein_tail(double t, double variance_sum, double K);
double operator_norm_tail(double t, double v, double K, int n, double c_bvh = 1.0);

} // namespace svp
