#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/test_util.hpp"
#include "svp/verify.hpp"

using namespace svp;

namespace {

noise_spec rademacher_spec(std::uint64_t seed, double scale = 1.0) {
    noise_spec s;
    s.kind = noise_kind::rademacher;
    s.scale = scale;
    s.seed = seed;
    return s;
}

bool same_records(const trial_run& a, const trial_run& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t t = 0; t < a.records.size(); ++t) {
        const trial_record& x = a.records[t];
        const trial_record& y = b.records[t];
        if (x.trial != y.trial || x.norm_e != y.norm_e) return false;
        if (x.entries.size() != y.entries.size()) return false;
        for (std::size_t j = 0; j < x.entries.size(); ++j) {
            const index_record& p = x.entries[j];
            const index_record& q = y.entries[j];
            if (p.i != q.i || p.sigma_tilde != q.sigma_tilde) return false;
            if (p.l2_err != q.l2_err || p.linf_err != q.linf_err) return false;
            if (p.u_tilde_inf != q.u_tilde_inf || p.deloc_ratio != q.deloc_ratio) return false;
            if (p.dk.status != q.dk.status || p.dk_theory != q.dk_theory) return false;
            if (p.ovw.status != q.ovw.status) return false;
            if (p.linf_main.status != q.linf_main.status) return false;
            if (p.linf_main.bound.value != q.linf_main.bound.value) return false;
            if (p.linf_refined.status != q.linf_refined.status) return false;
        }
    }
    return true;
}

double percentile99(std::vector<double> v) {
    REQUIRE(!v.empty());
    std::sort(v.begin(), v.end());
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(v.size())));
    return v[std::min(idx, v.size()) - 1];
}

} // namespace

TEST_CASE("zero noise run is exact") {
    partition_instance inst = partition_signal({{3, 2}, {1.0, 1.0}});
    trial_options opts;
    opts.trials = 3;
    trial_run run = run_trials(inst.a, 2, rademacher_spec(7, 0.0), opts);

    CHECK(run.records.size() == 3);
    CHECK(run.k_bound == 0.0);
    CHECK(run.t.T == 0.0);
    CHECK(run.stability.empty());       // degenerate noise: no verdicts to compute
    CHECK(run.indices == std::vector<int>{1, 2});
    for (const trial_record& rec : run.records) {
        CHECK(rec.norm_e == 0.0);
        REQUIRE(rec.entries.size() == 2);
        for (const index_record& e : rec.entries) {
            CHECK(e.l2_err == 0.0);
            CHECK(e.linf_err == 0.0);
            CHECK(e.sigma_tilde == run.summary.sigma_at(e.i));
            CHECK(e.dk.ok());
            CHECK(e.ovw.ok());
            CHECK(e.linf_main.ok());
            CHECK(e.linf_refined.ok());
            CHECK(e.deloc_ok);
        }
    }

    delocalization_report del = verify_delocalization(run);
    CHECK(del.entries == 6);
    CHECK(del.max_ratio <= 1.0);        // unperturbed vectors: ratio is 1/kappa_i
    CHECK(del.within_proved);

    run_stats st = aggregate(run);
    CHECK(st.trials == 3);
    CHECK(st.entries == 6);
    CHECK(st.dk_checked == 6);
    CHECK(st.dk_violations == 0);
    CHECK(st.linf_main_violations == 0);
    CHECK(st.deloc_violations == 0);
}

TEST_CASE("runs are deterministic and order independent") {
    clique_instance inst = clique_signal(400, 80, 11);
    trial_options opts;
    opts.trials = 50;
    trial_run run1 = run_trials(inst.a, 1, rademacher_spec(5), opts);
    trial_run run2 = run_trials(inst.a, 1, rademacher_spec(5), opts);
    CHECK(run1.records.size() == 50);
    CHECK(same_records(run1, run2));

    opts.threads = 3;
    trial_run run3 = run_trials(inst.a, 1, rademacher_spec(5), opts);
    CHECK(same_records(run1, run3));

    // Record invariants: sign-aligned distances land in [0, 2] and every
    // flag is exactly the measured <= bound comparison.
    for (const trial_record& rec : run1.records) {
        CHECK(rec.norm_e > 0.0);
        for (const index_record& e : rec.entries) {
            CHECK(e.l2_err >= 0.0);
            CHECK(e.l2_err <= 2.0);
            CHECK(e.linf_err >= 0.0);
            CHECK(e.linf_err <= 2.0);
            CHECK(e.eps1 == rec.norm_e / run1.summary.sigma_at(e.i));
            if (e.dk.status != check_status::precondition_unmet) {
                CHECK(e.dk.ok() == (e.dk.measured <= e.dk.bound.value));
            }
            CHECK(e.ovw.ok() == (e.ovw.bound.ok && e.ovw.measured <= e.ovw.bound.value));
            CHECK(e.linf_main.ok() ==
                  (e.linf_main.bound.ok && e.linf_main.measured <= e.linf_main.bound.value));
        }
    }

    run_stats st = aggregate(run1);
    CHECK(st.trials == 50);
    CHECK(st.ovw_checked == 50);
    CHECK(st.ovw_violations == 0);      // 3x margin on this family
    CHECK(st.linf_main_violations == 0);
    CHECK(st.linf_refined_violations == 0);
    CHECK(st.dk_theory_violations <= st.dk_checked);
    CHECK(st.linf_over_uinf_l2.count == 50);
    CHECK(st.linf_over_uinf_l2.max <= 5.0);
}

TEST_CASE("measured operator norm concentrates at twice root n") {
    clique_instance inst = clique_signal(1000, 1000, 3);  // rank 1, sigma_1 = n
    noise_spec g;
    g.kind = noise_kind::truncated_gaussian;
    g.seed = 21;
    trial_options opts;
    opts.trials = 4;
    trial_run run = run_trials(inst.a, 1, g, opts);
    for (const trial_record& rec : run.records) {
        CHECK(rec.norm_e / std::sqrt(1000.0) > 1.8);
        CHECK(rec.norm_e / std::sqrt(1000.0) < 2.2);
    }
}

TEST_CASE("trial preconditions") {
    clique_instance inst = clique_signal(20, 5, 1);
    trial_options opts;
    opts.trials = 0;
    CHECK_THROWS_AS((void)run_trials(inst.a, 1, rademacher_spec(1), opts), error);
    opts.trials = 1;
    opts.indices = {2};  // rank is 1
    CHECK_THROWS_AS((void)run_trials(inst.a, 1, rademacher_spec(1), opts), error);
    opts.indices = {1};
    noise_spec comp;
    comp.kind = noise_kind::completion_sampling;
    comp.p = 0.5;
    CHECK_THROWS_AS((void)run_trials(inst.a, 1, comp, opts), error);
}

TEST_CASE("exhaustive coordinate check with zero perturbation") {
    clique_instance inst = clique_signal(30, 10, 2);
    sym_matrix h(30);
    deterministic_report rep = verify_deterministic(inst.a, h, 1, 1);
    CHECK(rep.rows.size() == 30);
    CHECK(rep.assumptions_hold == 30);
    CHECK(rep.bound_holds_given_assumptions == 30);
    for (const coordinate_report& row : rep.rows) {
        CHECK(row.assumptions_ok);
        CHECK(row.lhs == 0.0);
        CHECK(row.holds);
    }
}

TEST_CASE("exhaustive coordinate check separates gating from violation") {
    clique_instance inst = clique_signal(50, 15, 4);

    // As loud as the noise scale sounds, 0.05 leaves ||H|| far above
    // sigma_1 / C0, so every coordinate is gated out; the counts must agree
    // without a single coordinate being booked as a violation.
    sym_matrix h = draw_noise(rademacher_spec(9, 0.05), 50);
    deterministic_report gated = verify_deterministic(inst.a, h, 1, 1);
    CHECK(gated.assumptions_hold == 0);
    CHECK(gated.bound_holds_given_assumptions == 0);
    for (const coordinate_report& row : gated.rows) CHECK_FALSE(row.assumptions_ok);

    // Three orders of magnitude down the assumptions hold everywhere, and
    // the theorem must then hold everywhere: any violation is a bug.
    sym_matrix h2 = draw_noise(rademacher_spec(9, 1e-4), 50);
    deterministic_report live = verify_deterministic(inst.a, h2, 1, 1);
    CHECK(live.assumptions_hold == 50);
    CHECK(live.bound_holds_given_assumptions == 50);
    for (const coordinate_report& row : live.rows) {
        CHECK(row.assumptions_ok);
        CHECK(row.lhs <= row.bound);
    }
}

TEST_CASE("exhaustive coordinate check refuses oversized instances") {
    clique_instance inst = clique_signal(20, 5, 1);
    sym_matrix h(20);
    deterministic_options opts;
    opts.size_cap = 10;
    try {
        (void)verify_deterministic(inst.a, h, 1, 1, opts);
        FAIL("expected a size_cap error");
    } catch (const error& e) {
        CHECK(e.code() == errc::size_cap);
    }
}

TEST_CASE("leading cluster sweep: delocalization, gap bound, stability") {
    clique_instance inst = clique_signal(1000, 250, 17);
    trial_options opts;
    opts.trials = 100;
    opts.indices = {1};
    opts.threads = 4;
    trial_run run = run_trials(inst.a, 1, rademacher_spec(29), opts);
    REQUIRE(run.records.size() == 100);

    REQUIRE(run.stability.size() == 1);
    CHECK(run.stability[0].verdict == "strongly_stable");

    // Strongly stable regime: not one infinity-norm violation is tolerated.
    run_stats st = aggregate(run);
    CHECK(st.linf_main_checked >= 100);
    CHECK(st.linf_main_violations == 0);
    CHECK(st.linf_refined_violations == 0);

    // Whenever the measured noise clears the gap gate, the calibrated gap
    // bound must hold; the unit-constant rate is recorded, not asserted.
    int gated = 0;
    for (const trial_record& rec : run.records) {
        for (const index_record& e : rec.entries) {
            if (run.summary.delta_at(e.i) >= 2.0 * rec.norm_e) {
                CHECK(e.dk.status != check_status::precondition_unmet);
                CHECK(e.dk.ok());
                gated += 1;
            }
        }
    }
    CHECK(gated == 100);
    CHECK(st.dk_violations == 0);
    CHECK(st.dk_theory_violations <= st.dk_checked);

    delocalization_report del = verify_delocalization(run, 10.0);
    CHECK(del.entries == 100);
    CHECK(del.paper_c == 2500.0);
    CHECK(del.within_proved);
    CHECK(del.max_ratio <= 25.0);  // two orders inside the proved constant
    CHECK(del.max_ratio >= 0.5);
    CHECK(del.within_calibrated);
}

TEST_CASE("infinity error tracks the l2 error across sizes") {
    // The working estimate behind the refined bound: the infinity error is
    // within a dimension-independent factor of u_inf times the l2 error.
    const std::vector<std::pair<int, int>> grid = {{250, 100}, {500, 100}, {1000, 40}, {2000, 20}};
    for (auto [n, trials] : grid) {
        clique_instance inst = clique_signal(n, n / 4, 13);
        trial_options opts;
        opts.trials = trials;
        opts.indices = {1};
        opts.threads = 4;
        trial_run run = run_trials(inst.a, 1, rademacher_spec(31), opts);
        std::vector<double> ratios;
        for (const trial_record& rec : run.records) {
            for (const index_record& e : rec.entries) {
                REQUIRE(e.l2_err > 0.0);
                ratios.push_back(e.linf_err / (run.summary.u_inf * e.l2_err));
            }
        }
        double p99 = percentile99(ratios);
        CHECK(p99 > 0.0);
        CHECK(p99 <= 5.0);
    }
}

TEST_CASE("perturbation facts on exact instances") {
    sym_matrix a = test_util::random_sym(12, 3);
    sym_matrix h(12);
    facts_instance_result res = check_facts(a, h, index_set({0, 5}, 12));
    CHECK(res.weyl_ok);
    CHECK(res.restriction_ok);
    CHECK(res.sign_checked >= 10);
    CHECK(res.sign_violations == 0);
}

TEST_CASE("perturbation facts over random instances") {
    facts_report rep = verify_facts(500, 30, 123);
    CHECK(rep.trials == 500);
    CHECK(rep.weyl_violations == 0);
    CHECK(rep.restriction_violations == 0);
    CHECK(rep.sign_checked > 1000);
    CHECK(rep.sign_violations == 0);
}

TEST_CASE("singular value tail table") {
    clique_instance inst = clique_signal(60, 40, 8);
    const double t_mid = std::sqrt(128.0);
    tail_table table =
        verify_singular_tails(inst.a, 1, rademacher_spec(15), 1, {0.0, t_mid, 50.0}, 500);
    CHECK(table.k == 1);
    CHECK(table.trials == 500);
    CHECK(table.sigma_k == doctest::Approx(40.0));
    REQUIRE(table.rows.size() == 3);

    CHECK(table.rows[0].t == 0.0);
    CHECK(table.rows[0].bound == doctest::Approx(36.0));  // vacuous, never flagged
    CHECK_FALSE(table.rows[0].flagged);

    CHECK(table.rows[1].bound == doctest::Approx(36.0 * std::exp(-1.0)));
    CHECK_FALSE(table.rows[1].flagged);

    // t beyond sigma_k: the value is nonnegative, so the event is empty.
    CHECK(table.rows[2].exceed == 0);
    CHECK(table.rows[2].frequency == 0.0);
    CHECK_FALSE(table.rows[2].flagged);

    CHECK(table.rows[0].bound > table.rows[1].bound);
    CHECK(table.rows[1].bound > table.rows[2].bound);
}

TEST_CASE("tail table preconditions") {
    clique_instance inst = clique_signal(20, 5, 1);
    noise_spec noise = rademacher_spec(2);
    try {
        (void)verify_singular_tails(inst.a, 1, noise, 1, {1.0}, 499);
        FAIL("expected too_few_trials");
    } catch (const error& e) {
        CHECK(e.code() == errc::too_few_trials);
    }
    CHECK_THROWS_AS((void)verify_singular_tails(inst.a, 1, noise, 0, {1.0}, 500), error);
    CHECK_THROWS_AS((void)verify_singular_tails(inst.a, 1, noise, 21, {1.0}, 500), error);
    CHECK_THROWS_AS((void)verify_singular_tails(inst.a, 1, noise, 1, {-1.0}, 500), error);
}

TEST_CASE("masking re-export matches the core operation") {
    sym_matrix h = test_util::random_sym(6, 77);
    index_set alpha({1, 4}, 6);
    CHECK(leave_alpha_out(h, alpha) == zero_out(h, alpha));
}
