#include "svp/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "svp/rng.hpp"

namespace svp {

const char* check_status_name(check_status s) {
    switch (s) {
        case check_status::holds: return "holds";
        case check_status::violated: return "violated";
        case check_status::precondition_unmet: return "precondition_unmet";
    }
    return "?";
}

bound_check make_check(double measured, bound_value bound) {
    bound_check c;
    c.measured = measured;
    c.bound = bound;
    if (!bound.ok) {
        c.status = check_status::precondition_unmet;
    } else {
        c.status = measured <= bound.value ? check_status::holds : check_status::violated;
    }
    return c;
}

namespace {

double max_abs_entry(const double* v, int n) {
    double m = 0.0;
    for (int l = 0; l < n; ++l) m = std::max(m, std::fabs(v[l]));
    return m;
}

// Strip the "code: " prefix error::what() carries so wrapping with a trial
// index does not stutter it.
std::string bare_message(const error& e) {
    std::string msg = e.what();
    std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    return msg;
}

} // namespace

trial_run run_trials(const sym_matrix& signal, int rank, const noise_spec& noise,
                     const trial_options& opts) {
    const int n = signal.n();
    require(opts.trials >= 1, errc::too_few_trials, "need at least one trial");
    require(noise.kind != noise_kind::completion_sampling, errc::bad_spec,
            "completion noise is tied to an observation pattern, not a trial sweep");
    noise.validate(n);

    spectral_decomposition ud = spectral_decompose(signal);
    trial_run run;
    run.summary = summarize_signal(ud, rank);
    run.noise = noise;
    run.indices = opts.indices;
    if (run.indices.empty()) {
        run.indices.resize(static_cast<std::size_t>(rank));
        for (int i = 0; i < rank; ++i) run.indices[static_cast<std::size_t>(i)] = i + 1;
    }
    for (int i : run.indices) {
        require(i >= 1 && i <= rank, errc::rank_exceeded,
                "requested component " + std::to_string(i) + " of rank " + std::to_string(rank));
    }

    run.k_bound = noise.resolved_k(n);
    run.c_main = opts.linf_c_main > 0.0 ? opts.linf_c_main : constants::linf_main_c(opts.c0, rank);
    run.c_refined =
        opts.linf_c_refined > 0.0 ? opts.linf_c_refined : constants::linf_refined_c(opts.c0, rank);
    run.t = estimate_T(noise, n, opts.tau, 0, t_mode::analytic, opts.c_bvh);
    if (run.k_bound > 0.0) {
        for (int i : run.indices) {
            run.stability.push_back(stability_check(run.summary, i, run.t.T, run.k_bound,
                                                    opts.stability_c, opts.stability_nu));
        }
    }

    const double deloc_c = constants::delocalization_c1(rank);

    auto run_one = [&](int trial) {
        trial_record rec;
        rec.trial = trial;
        sym_matrix e = draw_noise(noise, n, static_cast<std::uint32_t>(trial));
        rec.norm_e = spectral_norm(e);
        sym_matrix at = signal;
        at += e;
        spectral_decomposition td = spectral_decompose(at);
        rec.entries.reserve(run.indices.size());
        for (int i : run.indices) {
            index_record row;
            row.i = i;
            row.sigma_tilde = td.sigma_at(i);
            vector_distance d = vector_metrics(ud.vector_copy(i), td.vector_copy(i));
            row.l2_err = d.l2;
            row.linf_err = d.linf;
            row.u_tilde_inf = max_abs_entry(td.vector(i), n);
            row.eps1 = eps1(run.summary, i, rec.norm_e);
            row.eps2 = eps2(run.summary, i);

            const double delta = run.summary.delta_at(i);
            const double sigma = run.summary.sigma_at(i);
            row.dk = make_check(d.l2, davis_kahan(rec.norm_e, delta, opts.dk_c));
            row.dk_theory = make_check(d.l2, davis_kahan(rec.norm_e, delta, 1.0)).status;

            bound_value ovw_b = bound_value::flagged();
            if (delta > 0.0 && sigma > 0.0) {
                ovw_b = bound_value::of(
                    ovw_l2(run.k_bound, rank, delta, sigma, rec.norm_e, opts.ovw_c0));
            }
            row.ovw = make_check(d.l2, ovw_b);

            row.linf_main = make_check(
                d.linf, linf_main(run.summary, i, d.l2, rec.norm_e, run.k_bound, run.c_main));
            row.linf_refined = make_check(
                d.linf, linf_refined(run.summary, i, d.l2, rec.norm_e, run.k_bound, run.c_refined));

            row.deloc_ratio = row.u_tilde_inf / (run.summary.kappa_at(i) * run.summary.u_inf);
            row.deloc_ok = row.deloc_ratio <= deloc_c;
            rec.entries.push_back(row);
        }
        return rec;
    };

    run.records.resize(static_cast<std::size_t>(opts.trials));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(opts.trials));
    auto guarded = [&](int trial) {
        try {
            run.records[static_cast<std::size_t>(trial)] = run_one(trial);
        } catch (const error& e) {
            errors[static_cast<std::size_t>(trial)] = std::make_exception_ptr(
                error(e.code(), "trial " + std::to_string(trial) + ": " + bare_message(e)));
        } catch (...) {
            errors[static_cast<std::size_t>(trial)] = std::current_exception();
        }
    };

    const int workers = std::clamp(opts.threads, 1, opts.trials);
    if (workers == 1) {
        for (int t = 0; t < opts.trials; ++t) guarded(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < opts.trials; t = next.fetch_add(1)) guarded(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < opts.trials; ++t) {
        if (errors[static_cast<std::size_t>(t)]) {
            std::rethrow_exception(errors[static_cast<std::size_t>(t)]);
        }
    }
    return run;
}

namespace {

void update_ratio(ratio_stat& s, double value) {
    s.mean += value;  // running sum; divided out in finalize_ratio
    s.max = std::max(s.max, value);
    s.count += 1;
}

void finalize_ratio(ratio_stat& s) {
    if (s.count > 0) s.mean /= s.count;
}

} // namespace

run_stats aggregate(const trial_run& run) {
    run_stats st;
    st.trials = static_cast<int>(run.records.size());
    for (const trial_record& rec : run.records) {
        for (const index_record& e : rec.entries) {
            st.entries += 1;
            if (e.dk.status != check_status::precondition_unmet) {
                st.dk_checked += 1;
                if (e.dk.status == check_status::violated) st.dk_violations += 1;
                if (e.dk_theory == check_status::violated) st.dk_theory_violations += 1;
                if (e.dk.bound.value > 0.0) update_ratio(st.dk_ratio, e.dk.measured / e.dk.bound.value);
            }
            if (e.ovw.status != check_status::precondition_unmet) {
                st.ovw_checked += 1;
                if (e.ovw.status == check_status::violated) st.ovw_violations += 1;
                if (e.ovw.bound.value > 0.0) {
                    update_ratio(st.ovw_ratio, e.ovw.measured / e.ovw.bound.value);
                }
            }
            if (e.linf_main.status != check_status::precondition_unmet) {
                st.linf_main_checked += 1;
                if (e.linf_main.status == check_status::violated) st.linf_main_violations += 1;
                if (e.linf_main.bound.value > 0.0) {
                    update_ratio(st.linf_main_ratio, e.linf_main.measured / e.linf_main.bound.value);
                }
            }
            if (e.linf_refined.status != check_status::precondition_unmet) {
                st.linf_refined_checked += 1;
                if (e.linf_refined.status == check_status::violated) {
                    st.linf_refined_violations += 1;
                }
                if (e.linf_refined.bound.value > 0.0) {
                    update_ratio(st.linf_refined_ratio,
                                 e.linf_refined.measured / e.linf_refined.bound.value);
                }
            }
            if (!e.deloc_ok) st.deloc_violations += 1;
            st.max_deloc_ratio = std::max(st.max_deloc_ratio, e.deloc_ratio);
            if (e.l2_err > 0.0 && run.summary.u_inf > 0.0) {
                update_ratio(st.linf_over_uinf_l2, e.linf_err / (run.summary.u_inf * e.l2_err));
            }
        }
    }
    finalize_ratio(st.dk_ratio);
    finalize_ratio(st.ovw_ratio);
    finalize_ratio(st.linf_main_ratio);
    finalize_ratio(st.linf_refined_ratio);
    finalize_ratio(st.linf_over_uinf_l2);
    return st;
}

deterministic_report verify_deterministic(const sym_matrix& a, const sym_matrix& h, int rank,
                                          int i, const deterministic_options& opts) {
    require(a.n() <= opts.size_cap, errc::size_cap,
            "exhaustive check needs " + std::to_string(a.n()) + " decompositions, cap is " +
                std::to_string(opts.size_cap));
    coordinate_evaluator ev(a, h, rank, opts.c0_scale);
    deterministic_report rep;
    rep.i = i;
    rep.rows.reserve(static_cast<std::size_t>(a.n()));
    for (int l = 0; l < a.n(); ++l) {
        coordinate_report row = ev.evaluate(i, l);
        if (row.assumptions_ok) {
            rep.assumptions_hold += 1;
            if (row.holds) rep.bound_holds_given_assumptions += 1;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

delocalization_report verify_delocalization(const trial_run& run, double calibrated_c) {
    delocalization_report rep;
    rep.paper_c = constants::delocalization_c1(run.summary.r);
    rep.calibrated_c = calibrated_c;
    for (const trial_record& rec : run.records) {
        for (const index_record& e : rec.entries) {
            rep.entries += 1;
            rep.max_ratio = std::max(rep.max_ratio, e.deloc_ratio);
        }
    }
    rep.within_proved = rep.max_ratio <= rep.paper_c;
    rep.within_calibrated = calibrated_c > 0.0 && rep.max_ratio <= calibrated_c;
    return rep;
}

facts_instance_result check_facts(const sym_matrix& a, const sym_matrix& h,
                                  const index_set& alpha, double slack) {
    require(a.n() == h.n(), errc::shape_mismatch, "matrix and perturbation sizes differ");
    const int n = a.n();
    const double norm_h = spectral_norm(h);
    sym_matrix ah = a;
    ah += h;

    facts_instance_result res;
    std::vector<double> sa = singular_values(a);
    std::vector<double> st = singular_values(ah);
    res.weyl_ok = true;
    for (int i = 0; i < n; ++i) {
        if (std::fabs(st[static_cast<std::size_t>(i)] - sa[static_cast<std::size_t>(i)]) >
            norm_h + slack) {
            res.weyl_ok = false;
            break;
        }
    }
    res.restriction_ok = spectral_norm(zero_out(h, alpha)) <= norm_h + slack;

    spectral_decomposition da = spectral_decompose(a);
    spectral_decomposition dt = spectral_decompose(ah);
    std::vector<double> la(static_cast<std::size_t>(n));
    std::vector<double> lt(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        la[static_cast<std::size_t>(i - 1)] = da.sign_at(i) * da.sigma_at(i);
        lt[static_cast<std::size_t>(i - 1)] = dt.sign_at(i) * dt.sigma_at(i);
    }
    std::sort(la.begin(), la.end());
    std::sort(lt.begin(), lt.end());
    for (int i = 0; i < n; ++i) {
        const double lam = la[static_cast<std::size_t>(i)];
        if (std::fabs(lam) > norm_h + slack) {
            res.sign_checked += 1;
            if ((lam > 0.0) != (lt[static_cast<std::size_t>(i)] > 0.0)) res.sign_violations += 1;
        }
    }
    return res;
}

facts_report verify_facts(int trials, int n, std::uint64_t seed, double slack) {
    require(trials >= 1, errc::too_few_trials, "need at least one trial");
    require(n >= 1, errc::bad_size, "dimension must be >= 1");
    facts_report rep;
    rep.trials = trials;
    const std::uint32_t entries = static_cast<std::uint32_t>(n) * static_cast<std::uint32_t>(n);
    for (int t = 0; t < trials; ++t) {
        const std::uint32_t trial = static_cast<std::uint32_t>(t);
        // Entry layout within the trial: a upper triangle, then h, then the
        // alpha membership bits, then the h scale draw.
        rng_stream scale_g(seed, rng_purpose::facts_instance, trial, 3 * entries);
        const double h_scale = 0.05 + 0.45 * scale_g.next_unit();
        sym_matrix a(n);
        sym_matrix h(n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= j; ++i) {
                const std::uint32_t at = static_cast<std::uint32_t>(i * n + j);
                rng_stream ga(seed, rng_purpose::facts_instance, trial, at);
                a.set(i, j, 2.0 * ga.next_unit() - 1.0);
                rng_stream gh(seed, rng_purpose::facts_instance, trial, entries + at);
                h.set(i, j, h_scale * (2.0 * gh.next_unit() - 1.0));
            }
        }
        std::vector<int> members;
        for (int l = 0; l < n; ++l) {
            rng_stream gm(seed, rng_purpose::facts_instance, trial,
                          2 * entries + static_cast<std::uint32_t>(l));
            if (gm.next_bernoulli(0.5)) members.push_back(l);
        }
        facts_instance_result one = check_facts(a, h, index_set(members, n), slack);
        if (!one.weyl_ok) rep.weyl_violations += 1;
        if (!one.restriction_ok) rep.restriction_violations += 1;
        rep.sign_checked += one.sign_checked;
        rep.sign_violations += one.sign_violations;
    }
    return rep;
}

tail_table verify_singular_tails(const sym_matrix& signal, int rank, const noise_spec& noise,
                                 int k, const std::vector<double>& t_grid, int trials) {
    const int n = signal.n();
    require(trials >= 500, errc::too_few_trials,
            "tail frequencies need >= 500 trials, got " + std::to_string(trials));
    require(k >= 1 && k <= n, errc::index_out_of_range,
            "singular index " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    require(noise.kind != noise_kind::completion_sampling, errc::bad_spec,
            "completion noise is tied to an observation pattern, not a trial sweep");
    noise.validate(n);
    for (double t : t_grid) {
        require(t >= 0.0, errc::non_positive_input, "deviation grid entries must be >= 0");
    }

    tail_table table;
    table.k = k;
    table.trials = trials;
    table.sigma_k = singular_values(signal)[static_cast<std::size_t>(k - 1)];
    const double K = noise.resolved_k(n);

    std::vector<double> vals(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        sym_matrix at = signal;
        at += draw_noise(noise, n, static_cast<std::uint32_t>(t));
        vals[static_cast<std::size_t>(t)] = singular_values(at)[static_cast<std::size_t>(k - 1)];
    }

    table.rows.reserve(t_grid.size());
    for (double t : t_grid) {
        tail_row row;
        row.t = t;
        for (double v : vals) {
            if (v < table.sigma_k - t) row.exceed += 1;
        }
        row.frequency = static_cast<double>(row.exceed) / trials;
        row.bound = singular_tail_bound(k, rank, K, t, 0.0, 1.0).lower_prob;
        row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) / trials);
        row.flagged = row.frequency > row.bound + 3.0 * row.std_error;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace svp
