#pragma once

#include <cstdint>

#include "svp/matrix.hpp"

namespace svp {

// Entrywise-independent observation pattern at density p. The mask is a
// pure function of (seed, trial, entry position), so re-observing the same
// shape reproduces it.
struct observation_model {
    double p = 1.0;
    std::uint64_t seed = 0;
    std::uint32_t trial = 0;

    void validate() const;  // density must lie in (0, 1]
};

// Rescaled zero-filled observation: kept entries become a(i,j)/p, the rest
// 0, making the result an entrywise unbiased estimate of a.
rect_matrix observe(const rect_matrix& a, const observation_model& model);

// The 0/1 indicator behind observe (same draws, same mask).
rect_matrix observation_mask(int rows, int cols, const observation_model& model);

// How the singular value cutoff was chosen.
enum class cutoff_mode { override_value, incoherence, default_incoherence };
const char* cutoff_mode_name(cutoff_mode m);

struct completion_config {
    int rank = 1;                     // assumed upper bound on rank(a)
    double w_inf = 0.0;               // entrywise bound on the normalized
                                      // singular vectors; 0 = unknown
    double threshold_override = 0.0;  // direct cutoff; 0 = derive it

    void validate() const;
    cutoff_mode mode() const;
    // The override when set; otherwise 1/(8 rank w^2) with w defaulting to
    // sqrt(2 / n_total) when no incoherence bound was given.
    double cutoff(int n_total) const;
};

struct completion_output {
    rect_matrix rounded;  // integer entries
    rect_matrix approx;   // rank-s_tilde approximation before rounding
    int s_tilde = 0;
    double cutoff = 0.0;
    cutoff_mode mode = cutoff_mode::incoherence;
};

// Keep the singular components at or above the cutoff, then round each
// entry to the nearest integer, halves away from zero. Keeping zero
// components is legal and yields the zero matrix.
completion_output approximate_and_round(const rect_matrix& a_tilde, const completion_config& cfg);

// Observe a + x at the model density and run approximate_and_round. The
// recovery target stays a; x is the caller's bounded zero-mean corruption.
completion_output complete_noisy(const rect_matrix& a, const rect_matrix& x,
                                 const observation_model& model, const completion_config& cfg);

// Two-point +-b corruption (zero mean, b-bounded). b = 0 gives zeros.
rect_matrix draw_corruption(int rows, int cols, double b, std::uint64_t seed,
                            std::uint32_t trial = 0);

// a + (l+1) J. With |a_ij| <= l every output entry lands in [1, 2l+1];
// the rank grows by at most one. undo_shift inverts it.
rect_matrix shift_for_nonzero(const rect_matrix& a, long l);
rect_matrix undo_shift(const rect_matrix& a, long l);

struct recovery_report {
    bool exact = false;
    long wrong_entries = 0;
    double max_abs_err_prerounding = 0.0;
    // Entries of the approximation sitting exactly on a rounding boundary;
    // the margin-implies-exact equivalence is only guaranteed when 0.
    long half_ties = 0;
};

// Compare the integer target a against the pre-rounding approximation b:
// exact iff rounding b reproduces a, with the infinity-norm margin reported
// so the half-unit criterion is observable.
recovery_report check_recovery(const rect_matrix& a, const rect_matrix& b);

// Stability parameterization for gating completion trials: the constant
// fed to the spectral stability conditions, the tail level n_total^-3, the
// log exponent, the entrywise bound (|a|_inf + b) / p of the rescaled
// observation, and the matching analytic noise proxy.
struct mc_stability {
    double c = 0.0;
    double tau = 0.0;
    double nu = 2.0;
    double k_entry = 0.0;
    double t = 0.0;
};

mc_stability mc_stability_params(const rect_matrix& a, int rank, double p, double b);

} // namespace svp
