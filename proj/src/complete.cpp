#include "svp/complete.hpp"

#include <cmath>
#include <string>

#include "svp/bounds.hpp"
#include "svp/decompose.hpp"
#include "svp/error.hpp"
#include "svp/models.hpp"
#include "svp/rng.hpp"

namespace svp {

namespace {

std::uint32_t cell_entry(int i, int j, int cols) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) * cols + j);
}

bool cell_observed(const observation_model& model, int i, int j, int cols) {
    rng_stream g(model.seed, rng_purpose::observe_mask, model.trial, cell_entry(i, j, cols));
    return g.next_bernoulli(model.p);
}

} // namespace

void observation_model::validate() const {
    require(p > 0.0 && p <= 1.0, errc::bad_density, "observation density must lie in (0, 1]");
}

rect_matrix observe(const rect_matrix& a, const observation_model& model) {
    model.validate();
    if (model.p == 1.0) return a;  // every entry kept, rescale is identity
    rect_matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (cell_observed(model, i, j, a.cols())) out(i, j) = a(i, j) / model.p;
        }
    return out;
}

rect_matrix observation_mask(int rows, int cols, const observation_model& model) {
    model.validate();
    rect_matrix mask(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (model.p == 1.0 || cell_observed(model, i, j, cols)) mask(i, j) = 1.0;
        }
    return mask;
}

const char* cutoff_mode_name(cutoff_mode m) {
    switch (m) {
        case cutoff_mode::override_value: return "override";
        case cutoff_mode::incoherence: return "incoherence";
        case cutoff_mode::default_incoherence: return "default_incoherence";
    }
    return "unknown";
}

void completion_config::validate() const {
    require(rank >= 1, errc::bad_spec, "assumed rank must be >= 1");
    require(w_inf >= 0.0 && w_inf <= 1.0, errc::bad_spec,
            "incoherence bound must lie in (0, 1], or 0 for unknown");
    require(threshold_override >= 0.0, errc::bad_spec, "cutoff override must be >= 0");
}

cutoff_mode completion_config::mode() const {
    if (threshold_override > 0.0) return cutoff_mode::override_value;
    if (w_inf > 0.0) return cutoff_mode::incoherence;
    return cutoff_mode::default_incoherence;
}

double completion_config::cutoff(int n_total) const {
    validate();
    require(n_total >= 1, errc::bad_size, "total dimension must be >= 1");
    switch (mode()) {
        case cutoff_mode::override_value:
            return threshold_override;
        case cutoff_mode::incoherence:
            return 1.0 / (8.0 * rank * w_inf * w_inf);
        case cutoff_mode::default_incoherence:
            // w = sqrt(2 / n_total) collapses the cutoff to n_total / (16 rank)
            return static_cast<double>(n_total) / (16.0 * rank);
    }
    return 0.0;
}

completion_output approximate_and_round(const rect_matrix& a_tilde,
                                        const completion_config& cfg) {
    const int rows = a_tilde.rows();
    const int cols = a_tilde.cols();
    completion_output out;
    out.mode = cfg.mode();
    out.cutoff = cfg.cutoff(rows + cols);

    spectral_decomposition d = spectral_decompose(symmetrize(a_tilde));
    std::vector<double> sv = rect_singular_values(d);
    int s = 0;
    while (s < static_cast<int>(sv.size()) && sv[static_cast<std::size_t>(s)] >= out.cutoff) ++s;
    out.s_tilde = s;
    out.approx = low_rank_truncate_rect(d, s, rows, cols);

    out.rounded = rect_matrix(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            // + 0.0 folds a rounded -0 into +0
            out.rounded(i, j) = std::round(out.approx(i, j)) + 0.0;
        }
    return out;
}

completion_output complete_noisy(const rect_matrix& a, const rect_matrix& x,
                                 const observation_model& model, const completion_config& cfg) {
    require(a.rows() == x.rows() && a.cols() == x.cols(), errc::shape_mismatch,
            "corruption shape does not match the signal");
    return approximate_and_round(observe(a + x, model), cfg);
}

rect_matrix draw_corruption(int rows, int cols, double b, std::uint64_t seed,
                            std::uint32_t trial) {
    require(b >= 0.0, errc::bad_spec, "corruption bound must be >= 0");
    rect_matrix x(rows, cols);
    if (b == 0.0) return x;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            rng_stream g(seed, rng_purpose::corruption_entry, trial, cell_entry(i, j, cols));
            x(i, j) = g.next_bernoulli(0.5) ? b : -b;
        }
    return x;
}

rect_matrix shift_for_nonzero(const rect_matrix& a, long l) {
    require(l >= 0, errc::bad_spec, "shift bound must be >= 0");
    const double bound = static_cast<double>(l);
    rect_matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            double v = a(i, j);
            require(std::abs(v) <= bound, errc::bound_violated,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") exceeds the shift bound " + std::to_string(l));
            out(i, j) = v + static_cast<double>(l + 1);
        }
    return out;
}

rect_matrix undo_shift(const rect_matrix& a, long l) {
    rect_matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - static_cast<double>(l + 1);
    return out;
}

recovery_report check_recovery(const rect_matrix& a, const rect_matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), errc::shape_mismatch,
            "target " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                " vs approximation " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()));
    recovery_report rep;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double approx = b(i, j);
            rep.max_abs_err_prerounding =
                std::max(rep.max_abs_err_prerounding, std::abs(a(i, j) - approx));
            const double doubled = 2.0 * approx;
            if (doubled == std::nearbyint(doubled) &&
                std::fabs(std::fmod(doubled, 2.0)) == 1.0) {
                ++rep.half_ties;
            }
            if (std::round(approx) + 0.0 != a(i, j)) ++rep.wrong_entries;
        }
    rep.exact = rep.wrong_entries == 0;
    return rep;
}

mc_stability mc_stability_params(const rect_matrix& a, int rank, double p, double b) {
    require(rank >= 1, errc::bad_spec, "assumed rank must be >= 1");
    require(p > 0.0 && p <= 1.0, errc::bad_density, "observation density must lie in (0, 1]");
    require(b >= 0.0, errc::bad_spec, "corruption bound must be >= 0");
    const int n_total = a.rows() + a.cols();
    const double amp = a.max_abs() + b;

    mc_stability out;
    out.c = constants::completion_stability_c(rank);
    out.tau = std::pow(static_cast<double>(n_total), -3.0);
    out.nu = 2.0;
    out.k_entry = amp / p;

    noise_spec spec;
    spec.kind = noise_kind::completion_sampling;
    spec.p = p;
    out.t = estimate_T(spec, n_total, out.tau, 0, t_mode::analytic_completion, 1.0, amp).T;
    return out;
}

} // namespace svp
