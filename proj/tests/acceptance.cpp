// Acceptance gate. Run as `acceptance <k>` for k in 1..9; each criterion
// prints exactly one PASS/FAIL line and exits 0 on pass, 1 on fail. Every
// threshold is pinned here on purpose: the gate is not configurable.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "svp/bounds.hpp"
#include "svp/complete.hpp"
#include "svp/decompose.hpp"
#include "svp/models.hpp"
#include "svp/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("SVP_CLI_PATH")) return env;
    return SVP_CLI_PATH;
}

struct cli_result {
    int exit_code = -1;
    std::string output;
};

cli_result run_cli(const std::vector<std::string>& args) {
    std::string cmd = "'" + cli_path() + "'";
    for (const std::string& a : args) cmd += " '" + a + "'";
    cmd += " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    cli_result r;
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "svp-acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json load_only_json(const fs::path& dir) {
    fs::path found;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") {
            if (!found.empty()) throw std::runtime_error("multiple JSON artifacts in " + dir.string());
            found = e.path();
        }
    if (found.empty()) throw std::runtime_error("no JSON artifact in " + dir.string());
    return json::parse(slurp(found));
}

struct verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

// 1. Deterministic coordinate bound: 200 seeded random block-signal
// instances (n <= 100, r <= 3, noise scaled into the theorem's regime);
// every coordinate where all three assumptions hold must satisfy the bound
// (1e-9 slack, pinned inside the evaluator). The count floor guards against
// a vacuous pass where the assumptions never engage.
verdict criterion_1() {
    fs::path dir = scratch("crit1");
    cli_result r = run_cli({"det-verify", "--trials", "200", "--seed", "7", "--out", dir.string()});
    if (r.exit_code != 0)
        return {false, "det-verify exited " + std::to_string(r.exit_code) + ": " + r.output};
    json j = load_only_json(dir);
    long long checked = j["coordinates_checked"];
    long long violations = j["violations"];
    bool pass = violations == 0 && checked >= 5000;
    return {pass, std::to_string(violations) + " violations over " + std::to_string(checked) +
                      " assumption-satisfied coordinate evaluations (200 instances, floor 5000)"};
}

// 2. Value perturbation and restriction facts on 1000 random instances.
verdict criterion_2() {
    svp::facts_report rep = svp::verify_facts(1000, 60, 42);
    bool pass = rep.weyl_violations == 0 && rep.restriction_violations == 0 &&
                rep.sign_violations == 0;
    return {pass, "1000 instances: value-shift violations " + std::to_string(rep.weyl_violations) +
                      ", restriction violations " + std::to_string(rep.restriction_violations) +
                      ", sign violations " + std::to_string(rep.sign_violations) + " of " +
                      std::to_string(rep.sign_checked)};
}

// 3. Entrywise-to-l2 error ratio stays flat as n grows: 99th percentile of
// linf_err / (u_inf * l2_err) per n, factor < 3 across n and < 25 overall.
verdict criterion_3() {
    const int ns[4] = {250, 500, 1000, 2000};
    double lo = 0.0, hi = 0.0;
    std::string table;
    for (int idx = 0; idx < 4; ++idx) {
        int n = ns[idx];
        svp::clique_instance inst = svp::clique_signal(n, n / 4, 29);
        svp::noise_spec ns_spec;
        ns_spec.kind = svp::noise_kind::rademacher;
        ns_spec.scale = 1.0;
        ns_spec.seed = 29;
        svp::trial_options opts;
        opts.trials = 100;
        svp::trial_run run = svp::run_trials(inst.a, 1, ns_spec, opts);
        std::vector<double> ratios;
        for (const svp::trial_record& rec : run.records)
            ratios.push_back(rec.entries[0].linf_err /
                             (run.summary.u_inf * rec.entries[0].l2_err));
        std::sort(ratios.begin(), ratios.end());
        double p99 = ratios[98];
        if (idx == 0) lo = hi = p99;
        lo = std::min(lo, p99);
        hi = std::max(hi, p99);
        if (!table.empty()) table += ", ";
        table += "n=" + std::to_string(n) + ": " + fmt(p99);
    }
    bool pass = hi / lo < 3.0 && hi < 25.0;
    return {pass, "p99 ratios " + table + "; spread factor " + fmt(hi / lo) +
                      " (< 3), max " + fmt(hi) + " (< 25)"};
}

// 4. Planted-clique recovery sweep at n = 1000: fraction nondecreasing in
// c, full recovery from some c* <= 6 on.
verdict criterion_4() {
    fs::path dir = scratch("crit4");
    cli_result r = run_cli({"cluster-clique", "--n", "1000", "--sweep-c", "1:8", "--trials",
                            "40", "--seed", "47", "--out", dir.string()});
    if (r.exit_code != 0)
        return {false, "cluster-clique exited " + std::to_string(r.exit_code) + ": " + r.output};
    json j = load_only_json(dir);
    bool nondecreasing = j["nondecreasing"];
    int c_full = j["c_full"];
    std::string fractions;
    for (const auto& row : j["table"]) {
        if (!fractions.empty()) fractions += ",";
        fractions += fmt(double(row["fraction"]));
    }
    bool pass = nondecreasing && c_full >= 1 && c_full <= 6;
    return {pass, "fractions [" + fractions + "] nondecreasing=" +
                      (nondecreasing ? "yes" : "no") + ", full recovery from c=" +
                      std::to_string(c_full) + " (need <= 6)"};
}

// 5. Bounded-noise norm concentration: ||E|| / sqrt(n) near 2 for
// truncated-Gaussian entries at n = 2000.
verdict criterion_5() {
    svp::noise_spec ns;
    ns.kind = svp::noise_kind::truncated_gaussian;
    ns.scale = 1.0;
    ns.seed = 501;
    const int n = 2000;
    int in_band = 0;
    double lo = 1e9, hi = 0.0;
    for (int t = 0; t < 100; ++t) {
        svp::sym_matrix e = svp::draw_noise(ns, n, static_cast<std::uint32_t>(t));
        double ratio = svp::spectral_norm(e) / std::sqrt(double(n));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (ratio >= 1.85 && ratio <= 2.15) ++in_band;
    }
    bool pass = in_band >= 95;
    return {pass, std::to_string(in_band) + "/100 trials with norm/sqrt(n) in [1.85, 2.15]" +
                      " (observed range " + fmt(lo) + ".." + fmt(hi) + ")"};
}

// 6. Completion at scale: 1000 x 1000 two-block integer signal (values 16
// and 18), +-10 zero-mean corruption, 35% observed; want exact recovery in
// >= 9/10 trials with pre-rounding sup error < 0.5 in each success.
verdict criterion_6() {
    const int m = 1000, n = 1000;
    svp::rect_matrix values(2, 2);
    values(0, 0) = 16;
    values(0, 1) = 18;
    values(1, 0) = 18;
    values(1, 1) = 16;
    svp::rect_matrix a = svp::integer_block_signal(m, n, {500, 500}, {500, 500}, values);

    svp::completion_config cfg;
    cfg.rank = 2;
    int exact = 0;
    int tight = 0;  // successes with pre-rounding sup error < 0.5
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        svp::rect_matrix x = svp::draw_corruption(m, n, 10.0, 601, static_cast<std::uint32_t>(t));
        svp::observation_model om;
        om.p = 0.35;
        om.seed = 601;
        om.trial = static_cast<std::uint32_t>(t);
        svp::completion_output out = svp::complete_noisy(a, x, om, cfg);
        svp::recovery_report rep = svp::check_recovery(a, out.approx);
        worst = std::max(worst, rep.max_abs_err_prerounding);
        if (rep.exact) {
            ++exact;
            if (rep.max_abs_err_prerounding < 0.5) ++tight;
        }
    }
    bool pass = exact >= 9 && tight == exact;
    // The weak block direction carries value |16 - 18| / 2 * 1000 = 1000,
    // while the rescaled-observation noise proxy sits far above it at this
    // density and corruption level; when the run fails, report that margin.
    svp::mc_stability st = svp::mc_stability_params(a, 2, 0.35, 10.0);
    return {pass, std::to_string(exact) + "/10 exact (need >= 9), " + std::to_string(tight) +
                      " of them with pre-rounding sup error < 0.5; worst sup error " +
                      fmt(worst) + "; weak signal direction 1000 vs noise proxy T=" +
                      fmt(st.t)};
}

// 7. Lower-tail exceedance of the leading value stays within the stated
// tail formula plus three binomial standard errors on a 10-point grid.
verdict criterion_7() {
    svp::clique_instance inst = svp::clique_signal(150, 40, 701);
    svp::noise_spec ns;
    ns.kind = svp::noise_kind::rademacher;
    ns.scale = 1.0;
    ns.seed = 701;
    std::vector<double> grid;
    for (int jx = 1; jx <= 10; ++jx) grid.push_back(3.0 * jx);
    svp::tail_table tt = svp::verify_singular_tails(inst.a, 1, ns, 1, grid, 2000);
    int flagged = 0;
    int worst_exceed = 0;
    for (const svp::tail_row& row : tt.rows) {
        if (row.flagged) ++flagged;
        worst_exceed = std::max(worst_exceed, row.exceed);
    }
    bool pass = flagged == 0;
    return {pass, std::to_string(flagged) + "/10 grid points above bound + 3 SE over 2000 trials"
                      " (largest exceedance count " + std::to_string(worst_exceed) + ")"};
}

// 8. Delocalization of the perturbed leading vector on a strongly stable
// instance: ratio below the stated constant (2500 at rank 1) and below the
// calibrated constant 10.
verdict criterion_8() {
    svp::clique_instance inst = svp::clique_signal(1000, 250, 801);
    svp::noise_spec ns;
    ns.kind = svp::noise_kind::rademacher;
    ns.scale = 1.0;
    ns.seed = 801;
    svp::trial_options opts;
    opts.trials = 100;
    svp::trial_run run = svp::run_trials(inst.a, 1, ns, opts);
    std::string stability =
        run.stability.empty() ? std::string("unavailable") : run.stability[0].verdict;
    svp::delocalization_report rep = svp::verify_delocalization(run, 10.0);
    bool pass = stability == "strongly_stable" && rep.within_proved && rep.within_calibrated;
    return {pass, "instance " + stability + "; max ratio " + fmt(rep.max_ratio) + " over " +
                      std::to_string(rep.entries) + " trials, stated cap " + fmt(rep.paper_c) +
                      ", calibrated cap 10"};
}

// 9. Rerunning a command with identical config and seed reproduces every
// artifact byte for byte; CSVs additionally reproduce across different
// output directories (the output path is not part of the results).
verdict criterion_9() {
    const std::vector<std::vector<std::string>> runs = {
        {"det-verify", "--trials", "5", "--n", "60", "--seed", "11"},
        {"cluster-clique", "--n", "300", "--sweep-c", "2:3", "--trials", "3", "--seed", "47"},
        {"complete", "--rows", "80", "--cols", "80", "--trials", "3", "--seed", "5"},
    };
    auto snapshot = [](const fs::path& dir) {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::directory_iterator(dir))
            files[e.path().filename().string()] = slurp(e.path());
        return files;
    };
    int files_compared = 0;
    for (size_t idx = 0; idx < runs.size(); ++idx) {
        fs::path a = scratch("crit9-" + std::to_string(idx) + "a");
        fs::path b = scratch("crit9-" + std::to_string(idx) + "b");
        auto run_into = [&](const fs::path& dir) {
            std::vector<std::string> args = runs[idx];
            args.insert(args.end(), {"--out", dir.string()});
            return run_cli(args);
        };
        if (run_into(a).exit_code != 0) return {false, runs[idx][0] + " failed"};
        std::map<std::string, std::string> first = snapshot(a);
        if (run_into(a).exit_code != 0) return {false, runs[idx][0] + " failed on rerun"};
        std::map<std::string, std::string> second = snapshot(a);
        if (first != second)
            return {false, runs[idx][0] + ": artifacts differ between identical reruns"};
        if (run_into(b).exit_code != 0) return {false, runs[idx][0] + " failed in second dir"};
        for (const auto& [name, content] : snapshot(b)) {
            if (fs::path(name).extension() == ".json") continue;  // echoes --out
            auto it = first.find(name);
            if (it == first.end())
                return {false, runs[idx][0] + ": " + name + " missing from first directory"};
            if (it->second != content)
                return {false, runs[idx][0] + ": " + name + " differs across directories"};
        }
        files_compared += static_cast<int>(first.size());
    }
    return {true, "3 commands rerun, " + std::to_string(files_compared) +
                      " artifacts byte-identical; CSVs and sidecars also identical "
                      "across output directories"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..9>\n";
        return 1;
    }
    int k = std::atoi(argv[1]);
    verdict v;
    try {
        switch (k) {
            case 1: v = criterion_1(); break;
            case 2: v = criterion_2(); break;
            case 3: v = criterion_3(); break;
            case 4: v = criterion_4(); break;
            case 5: v = criterion_5(); break;
            case 6: v = criterion_6(); break;
            case 7: v = criterion_7(); break;
            case 8: v = criterion_8(); break;
            case 9: v = criterion_9(); break;
            default:
                std::cerr << "usage: acceptance <criterion 1..9>\n";
                return 1;
        }
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "CRITERION " << k << (v.pass ? " PASS: " : " FAIL: ") << v.detail << "\n";
    return v.pass ? 0 : 1;
}
