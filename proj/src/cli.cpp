#include "svp/cli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svp/artifacts.hpp"
#include "svp/bounds.hpp"
#include "svp/cluster.hpp"
#include "svp/complete.hpp"
#include "svp/decompose.hpp"
#include "svp/error.hpp"
#include "svp/matrix.hpp"
#include "svp/models.hpp"
#include "svp/rng.hpp"
#include "svp/verify.hpp"

namespace svp {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        require(pos == s.size(), errc::bad_spec, what + ": '" + s + "' is not an integer");
        return v;
    } catch (const error&) {
        throw;
    } catch (const std::exception&) {
        fail(errc::bad_spec, what + ": '" + s + "' is not an integer");
    }
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        require(pos == s.size(), errc::bad_spec, what + ": '" + s + "' is not a number");
        return v;
    } catch (const error&) {
        throw;
    } catch (const std::exception&) {
        fail(errc::bad_spec, what + ": '" + s + "' is not a number");
    }
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (const std::string& item : split(s, ',')) out.push_back(parse_int(item, what));
    require(!out.empty(), errc::bad_spec, what + " must be a nonempty comma list");
    return out;
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const std::string& item : split(s, ',')) out.push_back(parse_real(item, what));
    require(!out.empty(), errc::bad_spec, what + " must be a nonempty comma list");
    return out;
}

// "lo:hi" or a single value; both endpoints inclusive.
struct sweep_range {
    int lo = 1, hi = 1;
};

sweep_range parse_sweep(const std::string& s) {
    sweep_range r;
    auto colon = s.find(':');
    if (colon == std::string::npos) {
        r.lo = r.hi = parse_int(trim(s), "sweep");
    } else {
        r.lo = parse_int(trim(s.substr(0, colon)), "sweep");
        r.hi = parse_int(trim(s.substr(colon + 1)), "sweep");
    }
    require(r.lo >= 1 && r.hi >= r.lo, errc::bad_spec,
            "sweep must be lo:hi with 1 <= lo <= hi, got '" + s + "'");
    return r;
}

// Rows separated by ';', entries by ','; all rows the same width.
rect_matrix parse_values_grid(const std::string& s) {
    std::vector<std::vector<double>> rows;
    for (const std::string& row : split(s, ';'))
        rows.push_back(parse_real_list(row, "values"));
    require(!rows.empty(), errc::bad_spec, "values grid must be nonempty");
    rect_matrix out(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        require(rows[i].size() == rows[0].size(), errc::bad_spec,
                "values grid rows must share one width");
        for (size_t j = 0; j < rows[i].size(); ++j)
            out(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return out;
}

const char* t_mode_name(t_mode m) {
    switch (m) {
        case t_mode::monte_carlo: return "monte_carlo";
        case t_mode::analytic: return "analytic";
        case t_mode::analytic_completion: return "analytic_completion";
    }
    return "?";
}

// ---- config files ---------------------------------------------------------
//
// Plain "key = value" lines with optional [command] sections; '#' starts a
// comment. Keys before any section must be the common options shared by all
// commands; command-specific keys live in their section. The file only fills
// values the command line did not set.

struct config_file {
    std::map<std::string, std::string> global;
    std::map<std::string, std::map<std::string, std::string>> sections;
};

config_file parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::io_error, "cannot read config file " + path);
    config_file out;
    std::map<std::string, std::string>* section = &out.global;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line.substr(0, line.find('#')));
        if (s.empty()) continue;
        std::string where = path + " line " + std::to_string(lineno);
        if (s.front() == '[') {
            require(s.back() == ']', errc::bad_spec, where + ": unterminated section header");
            std::string name = trim(s.substr(1, s.size() - 2));
            require(!name.empty(), errc::bad_spec, where + ": empty section name");
            section = &out.sections[name];
            continue;
        }
        auto eq = s.find('=');
        require(eq != std::string::npos, errc::bad_spec, where + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        require(!key.empty(), errc::bad_spec, where + ": empty key");
        (*section)[key] = value;
    }
    return out;
}

bool has_long_option(const CLI::App* sub, const std::string& name) {
    for (const CLI::Option* opt : sub->get_options())
        for (const std::string& lname : opt->get_lnames())
            if (lname == name) return true;
    return false;
}

void validate_config(const config_file& cf, const std::map<std::string, CLI::App*>& subs) {
    static const std::set<std::string> common = {"seed", "trials", "out", "threads"};
    for (const auto& [key, value] : cf.global) {
        (void)value;
        require(common.count(key) != 0, errc::bad_spec,
                "config key '" + key +
                    "' outside a section; only seed, trials, out, threads are global");
    }
    for (const auto& [name, entries] : cf.sections) {
        auto it = subs.find(name);
        require(it != subs.end(), errc::bad_spec,
                "config section [" + name + "] is not a command");
        for (const auto& [key, value] : entries) {
            (void)value;
            require(has_long_option(it->second, key), errc::bad_spec,
                    "config key '" + key + "' is not an option of command '" + name + "'");
        }
    }
}

// File values become "--key=value" tokens placed ahead of the user's own
// flags; with last-wins option policy the command line overrides the file,
// and a command section overrides the global block.
std::vector<std::string> merge_config(const config_file& cf, const std::vector<std::string>& args) {
    std::vector<std::string> merged;
    merged.push_back(args[0]);
    auto inject = [&merged](const std::map<std::string, std::string>& kv) {
        for (const auto& [key, value] : kv) merged.push_back("--" + key + "=" + value);
    };
    inject(cf.global);
    auto sec = cf.sections.find(args[0]);
    if (sec != cf.sections.end()) inject(sec->second);
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

// ---- shared plumbing -------------------------------------------------------

struct common_opts {
    std::uint64_t seed = 0;
    int trials = 0;
    std::string out = ".";
    int threads = 1;
};

void add_common(CLI::App* sub, common_opts& c, int default_trials) {
    c.trials = default_trials;
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--seed", c.seed, "master seed; every random draw derives from it");
    sub->add_option("--trials", c.trials, "Monte Carlo trials");
    sub->add_option("--out", c.out, "directory artifacts are written into");
    sub->add_option("--threads", c.threads, "worker threads; results do not depend on this");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(fs::is_directory(dir), errc::io_error, "cannot create output directory " + dir);
}

void check_common(const common_opts& c) {
    require(c.trials >= 1, errc::bad_spec, "trials must be at least 1");
    require(c.threads >= 1, errc::bad_spec, "threads must be at least 1");
    ensure_dir(c.out);
}

void echo_common(config_echo& cfg, const std::string& command, const common_opts& c) {
    cfg.put("command", command);
    cfg.put("seed", c.seed);
    cfg.put("trials", c.trials);
    cfg.put("out", c.out);
    cfg.put("threads", c.threads);
}

std::string out_path(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

// Runs body(t) for t in [0, trials); body may only touch slot t of
// preallocated storage. Exceptions surface after the join, lowest trial
// first, so the reported failure does not depend on scheduling.
template <typename Fn>
void parallel_trials(int trials, int threads, Fn&& body) {
    const int workers = std::clamp(threads, 1, trials);
    if (workers <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(trials));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
                try {
                    body(t);
                } catch (...) {
                    errors[static_cast<size_t>(t)] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (int t = 0; t < trials; ++t)
        if (errors[static_cast<size_t>(t)]) std::rethrow_exception(errors[static_cast<size_t>(t)]);
}

ordered_json summary_skeleton(const std::string& command, const config_echo& cfg,
                              std::uint64_t seed) {
    ordered_json j;
    j["artifact_version"] = artifact_version;
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    j["seed"] = seed;
    j["config"] = ordered_json::object();
    for (const auto& [k, v] : cfg.items()) j["config"][k] = v;
    return j;
}

void write_summary(const std::string& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

noise_spec make_noise(const std::string& name, double scale, double p, std::uint64_t seed) {
    noise_kind kind = noise_kind_from_name(name);
    require(kind == noise_kind::rademacher || kind == noise_kind::truncated_gaussian ||
                kind == noise_kind::centered_edge,
            errc::bad_spec, "noise kind '" + name + "' is not available from the command line");
    noise_spec ns;
    ns.kind = kind;
    ns.scale = scale;
    ns.p = p;
    ns.seed = seed;
    return ns;
}

struct model_signal {
    sym_matrix a{1};
    int rank = 1;
};

model_signal build_model_signal(const std::string& model, int n, int k, const std::string& sizes,
                                const std::string& densities, double cross, int rank_override,
                                std::uint64_t seed) {
    if (model == "clique") {
        model_signal ms;
        ms.a = clique_signal(n, k, seed).a;
        ms.rank = rank_override > 0 ? rank_override : 1;
        return ms;
    }
    if (model == "partition") {
        partition_spec spec{parse_int_list(sizes, "sizes"), parse_real_list(densities, "densities"),
                            cross};
        model_signal ms;
        ms.a = partition_signal(spec).a;
        ms.rank = rank_override > 0 ? rank_override : spec.r();
        return ms;
    }
    fail(errc::bad_spec, "model must be clique or partition, got '" + model + "'");
}

ordered_json ratio_json(const ratio_stat& r) {
    return ordered_json{{"mean", r.mean}, {"max", r.max}, {"count", r.count}};
}

ordered_json stability_json(const stability_report& s) {
    return ordered_json{{"T", s.T},
                        {"verdict", s.verdict},
                        {"cond_a", s.cond_a},
                        {"cond_b", s.cond_b},
                        {"cond_c", s.cond_c},
                        {"cond_strong", s.cond_strong},
                        {"margin_a", s.margin_a},
                        {"margin_b", s.margin_b},
                        {"margin_c", s.margin_c},
                        {"margin_strong", s.margin_strong}};
}

// ---- perturb-verify --------------------------------------------------------

struct perturb_opts {
    common_opts c;
    std::string model = "clique";
    int n = 400;
    int k = 80;
    std::string sizes = "200,200";
    std::string densities = "0.9,0.6";
    double cross = 0.5;
    int rank = 0;
    std::string noise = "rademacher";
    double scale = 1.0;
    double p = 0.5;
    double deloc_c = 10.0;
    double c0 = 1.0;
};

CLI::App* setup_perturb(CLI::App& app, perturb_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "perturb-verify", "Monte Carlo sweep of the perturbation bounds on a planted signal");
    add_common(sub, o.c, 50);
    sub->add_option("--model", o.model, "signal family: clique or partition");
    sub->add_option("--n", o.n, "ambient dimension (clique model)");
    sub->add_option("--k", o.k, "clique size (clique model)");
    sub->add_option("--sizes", o.sizes, "block sizes, comma list (partition model)");
    sub->add_option("--densities", o.densities, "block densities, comma list (partition model)");
    sub->add_option("--cross", o.cross, "cross-block density (partition model)");
    sub->add_option("--rank", o.rank, "components to track; 0 = model default");
    sub->add_option("--noise", o.noise, "rademacher, truncated_gaussian, or centered_edge");
    sub->add_option("--scale", o.scale, "noise amplitude");
    sub->add_option("--p", o.p, "edge density for centered_edge noise");
    sub->add_option("--deloc-c", o.deloc_c, "calibrated delocalization constant; 0 disables");
    sub->add_option("--c0", o.c0, "exponent feeding the bound constant tables");
    return sub;
}

int run_perturb(const perturb_opts& o) {
    check_common(o.c);
    model_signal ms =
        build_model_signal(o.model, o.n, o.k, o.sizes, o.densities, o.cross, o.rank, o.c.seed);
    noise_spec ns = make_noise(o.noise, o.scale, o.p, o.c.seed);

    trial_options topts;
    topts.trials = o.c.trials;
    topts.threads = o.c.threads;
    topts.c0 = o.c0;
    trial_run run = run_trials(ms.a, ms.rank, ns, topts);
    run_stats stats = aggregate(run);
    delocalization_report deloc = verify_delocalization(run, o.deloc_c);

    config_echo cfg;
    echo_common(cfg, "perturb-verify", o.c);
    cfg.put("model", o.model);
    cfg.put("n", o.n);
    cfg.put("k", o.k);
    cfg.put("sizes", o.sizes);
    cfg.put("densities", o.densities);
    cfg.put("cross", o.cross);
    cfg.put("rank", ms.rank);
    cfg.put("noise", o.noise);
    cfg.put("scale", o.scale);
    cfg.put("p", o.p);
    cfg.put("deloc-c", o.deloc_c);
    cfg.put("c0", o.c0);
    std::string stem = artifact_stem("perturb-verify", cfg, o.c.seed);

    csv_file csv({"trial", "i", "sigma_tilde", "l2_err", "linf_err", "u_tilde_inf", "deloc_ratio",
                  "eps1", "eps2", "dk_bound", "dk_status", "dk_theory_status", "ovw_bound",
                  "ovw_status", "linf_main_bound", "linf_main_status", "linf_refined_bound",
                  "linf_refined_status"});
    for (const trial_record& rec : run.records)
        for (const index_record& e : rec.entries)
            csv.add_row({cell(rec.trial), cell(e.i), cell(e.sigma_tilde), cell(e.l2_err),
                         cell(e.linf_err), cell(e.u_tilde_inf), cell(e.deloc_ratio), cell(e.eps1),
                         cell(e.eps2), cell(e.dk.bound.value), check_status_name(e.dk.status),
                         check_status_name(e.dk_theory), cell(e.ovw.bound.value),
                         check_status_name(e.ovw.status), cell(e.linf_main.bound.value),
                         check_status_name(e.linf_main.status), cell(e.linf_refined.bound.value),
                         check_status_name(e.linf_refined.status)});
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    ordered_json j = summary_skeleton("perturb-verify", cfg, o.c.seed);
    j["k_bound"] = run.k_bound;
    j["c_main"] = run.c_main;
    j["c_refined"] = run.c_refined;
    j["noise_level"] = ordered_json{
        {"T", run.t.T}, {"mode", t_mode_name(run.t.mode)}, {"trials", run.t.trials}};
    j["stability"] = ordered_json::array();
    for (size_t pos = 0; pos < run.stability.size(); ++pos) {
        ordered_json item = stability_json(run.stability[pos]);
        item["i"] = run.indices[pos];
        j["stability"].push_back(item);
    }
    j["stats"] = ordered_json{{"trials", stats.trials},
                              {"entries", stats.entries},
                              {"dk_checked", stats.dk_checked},
                              {"dk_violations", stats.dk_violations},
                              {"dk_theory_violations", stats.dk_theory_violations},
                              {"ovw_checked", stats.ovw_checked},
                              {"ovw_violations", stats.ovw_violations},
                              {"linf_main_checked", stats.linf_main_checked},
                              {"linf_main_violations", stats.linf_main_violations},
                              {"linf_refined_checked", stats.linf_refined_checked},
                              {"linf_refined_violations", stats.linf_refined_violations},
                              {"deloc_violations", stats.deloc_violations},
                              {"dk_ratio", ratio_json(stats.dk_ratio)},
                              {"ovw_ratio", ratio_json(stats.ovw_ratio)},
                              {"linf_main_ratio", ratio_json(stats.linf_main_ratio)},
                              {"linf_refined_ratio", ratio_json(stats.linf_refined_ratio)},
                              {"linf_over_uinf_l2", ratio_json(stats.linf_over_uinf_l2)},
                              {"max_deloc_ratio", stats.max_deloc_ratio}};
    j["delocalization"] = ordered_json{{"entries", deloc.entries},
                                       {"max_ratio", deloc.max_ratio},
                                       {"paper_c", deloc.paper_c},
                                       {"within_proved", deloc.within_proved},
                                       {"calibrated_c", deloc.calibrated_c},
                                       {"within_calibrated", deloc.within_calibrated}};
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "perturb-verify: trials=" << stats.trials << " entries=" << stats.entries
              << " dk=" << stats.dk_violations << "/" << stats.dk_checked << " ovw="
              << stats.ovw_violations << "/" << stats.ovw_checked << " linf_main="
              << stats.linf_main_violations << "/" << stats.linf_main_checked << " linf_refined="
              << stats.linf_refined_violations << "/" << stats.linf_refined_checked
              << " max_deloc=" << format_double(stats.max_deloc_ratio) << " artifacts=" << stem
              << "\n";
    return 0;
}

// ---- det-verify -------------------------------------------------------------

struct det_opts {
    common_opts c;
    int n = 100;
    int n_min = 30;
    int r_max = 3;
    // The stated constant is ~1088 r^{3/2}, so the assumptions only engage
    // when the noise sits a few orders below the smallest tracked value.
    double scale_min = 1e-5;
    double scale_max = 3e-4;
    double c0_scale = 1.0;
    bool inject = false;
};

CLI::App* setup_det(CLI::App& app, det_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "det-verify",
        "coordinatewise deterministic theorem on seeded instances; exits 2 on any violation");
    add_common(sub, o.c, 20);
    sub->add_option("--n", o.n, "largest instance size");
    sub->add_option("--n-min", o.n_min, "smallest instance size");
    sub->add_option("--r-max", o.r_max, "largest block count");
    sub->add_option("--scale-min", o.scale_min, "smallest noise amplitude");
    sub->add_option("--scale-max", o.scale_max, "largest noise amplitude");
    sub->add_option("--c0-scale", o.c0_scale, "rescales the theorem constant; 1 = as stated");
    sub->add_flag("--inject-violation", o.inject,
                  "count one synthetic violation to exercise the exit-code contract")
        ->group("");
    return sub;
}

int run_det(const det_opts& o) {
    check_common(o.c);
    require(o.n_min >= 8, errc::bad_spec, "n-min must be at least 8");
    require(o.n >= o.n_min, errc::bad_spec, "n must be at least n-min");
    require(o.n <= 300, errc::size_cap, "instance size cap is 300");
    require(o.r_max >= 1 && o.r_max <= 8, errc::bad_spec, "r-max must lie in [1, 8]");
    require(o.scale_min > 0.0 && o.scale_max >= o.scale_min, errc::bad_spec,
            "noise amplitude range must be positive and ordered");

    struct per_index {
        int i = 0;
        int held = 0;
        int holds = 0;
        double min_slack = std::numeric_limits<double>::infinity();
    };
    struct instance_result {
        int n = 0, r = 0;
        double scale = 0.0;
        std::vector<per_index> idx;
    };
    std::vector<instance_result> results(static_cast<size_t>(o.c.trials));

    parallel_trials(o.c.trials, o.c.threads, [&](int t) {
        // The instance is a pure function of (seed, t): size, block count,
        // sizes, densities, and noise amplitude all come from one stream.
        rng_stream g(o.c.seed, rng_purpose::signal_entry, static_cast<std::uint32_t>(t), 0);
        int n = o.n_min + static_cast<int>(g.next_below(static_cast<std::uint64_t>(o.n - o.n_min + 1)));
        int r = 1 + static_cast<int>(g.next_below(static_cast<std::uint64_t>(o.r_max)));
        double cross = 0.2 + 0.3 * g.next_unit();
        std::vector<int> sizes(static_cast<size_t>(r), n / (2 * r));
        int rest = n - (n / (2 * r)) * r;
        for (int u = 0; u < rest; ++u) sizes[g.next_below(static_cast<std::uint64_t>(r))] += 1;
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        double lo = cross + 0.15;
        std::vector<double> dens(static_cast<size_t>(r));
        for (double& d : dens) d = lo + (0.95 - lo) * g.next_unit();
        std::sort(dens.begin(), dens.end(), std::greater<>());
        double log_lo = std::log(o.scale_min);
        double log_hi = std::log(o.scale_max);
        double scale = std::exp(log_lo + (log_hi - log_lo) * g.next_unit());

        partition_spec spec{sizes, dens, cross};
        sym_matrix a = partition_signal(spec).a;
        noise_spec ns;
        ns.kind = noise_kind::rademacher;
        ns.scale = scale;
        ns.seed = o.c.seed;
        sym_matrix h = draw_noise(ns, n, static_cast<std::uint32_t>(t));

        coordinate_evaluator eval(a, h, r, o.c0_scale);
        std::vector<int> indices(static_cast<size_t>(r));
        std::iota(indices.begin(), indices.end(), 1);
        instance_result& res = results[static_cast<size_t>(t)];
        res.n = n;
        res.r = r;
        res.scale = scale;
        res.idx.resize(static_cast<size_t>(r));
        for (int i = 1; i <= r; ++i) res.idx[static_cast<size_t>(i - 1)].i = i;
        for (int l = 0; l < n; ++l) {
            for (const coordinate_report& rep : eval.evaluate_column(l, indices)) {
                per_index& pi = res.idx[static_cast<size_t>(rep.i - 1)];
                if (!rep.assumptions_ok) continue;
                pi.held += 1;
                pi.min_slack = std::min(pi.min_slack, rep.bound - rep.lhs);
                if (rep.holds) pi.holds += 1;
            }
        }
    });

    config_echo cfg;
    echo_common(cfg, "det-verify", o.c);
    cfg.put("n", o.n);
    cfg.put("n-min", o.n_min);
    cfg.put("r-max", o.r_max);
    cfg.put("scale-min", o.scale_min);
    cfg.put("scale-max", o.scale_max);
    cfg.put("c0-scale", o.c0_scale);
    cfg.put("inject-violation", o.inject);
    std::string stem = artifact_stem("det-verify", cfg, o.c.seed);

    csv_file csv({"instance", "n", "r", "scale", "i", "coords", "assumptions_hold", "bound_holds",
                  "violations", "min_slack"});
    long long held_total = 0, holds_total = 0;
    for (int t = 0; t < o.c.trials; ++t) {
        const instance_result& res = results[static_cast<size_t>(t)];
        for (const auto& pi : res.idx) {
            held_total += pi.held;
            holds_total += pi.holds;
            csv.add_row({cell(t), cell(res.n), cell(res.r), cell(res.scale), cell(pi.i),
                         cell(res.n), cell(pi.held), cell(pi.holds), cell(pi.held - pi.holds),
                         pi.held > 0 ? cell(pi.min_slack) : "nan"});
        }
    }
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    long long violations = held_total - holds_total;
    if (o.inject) violations += 1;

    ordered_json j = summary_skeleton("det-verify", cfg, o.c.seed);
    j["instances"] = o.c.trials;
    j["coordinates_checked"] = held_total;
    j["bound_holds"] = holds_total;
    j["violations"] = violations;
    j["injected"] = o.inject;
    j["verdict"] = violations == 0 ? "sound" : "violated";
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "det-verify: instances=" << o.c.trials << " assumptions_hold=" << held_total
              << " violations=" << violations << (o.inject ? " (one injected)" : "")
              << " artifacts=" << stem << "\n";
    return violations > 0 ? 2 : 0;
}

// ---- tails -------------------------------------------------------------------

struct tails_opts {
    common_opts c;
    int n = 150;
    int k = 40;
    int index = 1;
    int rank = 1;
    double t_max = 30.0;
    int points = 10;
    std::string noise = "rademacher";
    double scale = 1.0;
    double p = 0.5;
};

CLI::App* setup_tails(CLI::App& app, tails_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "tails", "lower-tail exceedance of a perturbed singular value against the formula bound");
    add_common(sub, o.c, 2000);
    sub->add_option("--n", o.n, "ambient dimension");
    sub->add_option("--k", o.k, "clique size of the planted signal");
    sub->add_option("--index", o.index, "singular index whose tail is measured");
    sub->add_option("--rank", o.rank, "effective rank fed to the bound");
    sub->add_option("--t-max", o.t_max, "largest deviation on the grid");
    sub->add_option("--points", o.points, "grid points between 0 and t-max");
    sub->add_option("--noise", o.noise, "rademacher, truncated_gaussian, or centered_edge");
    sub->add_option("--scale", o.scale, "noise amplitude");
    sub->add_option("--p", o.p, "edge density for centered_edge noise");
    return sub;
}

int run_tails(const tails_opts& o) {
    check_common(o.c);
    require(o.points >= 1, errc::bad_spec, "points must be at least 1");
    require(o.t_max > 0.0, errc::bad_spec, "t-max must be positive");
    sym_matrix signal = clique_signal(o.n, o.k, o.c.seed).a;
    noise_spec ns = make_noise(o.noise, o.scale, o.p, o.c.seed);
    std::vector<double> grid(static_cast<size_t>(o.points));
    for (int i = 0; i < o.points; ++i) grid[static_cast<size_t>(i)] = o.t_max * (i + 1) / o.points;
    tail_table table = verify_singular_tails(signal, o.rank, ns, o.index, grid, o.c.trials);

    config_echo cfg;
    echo_common(cfg, "tails", o.c);
    cfg.put("n", o.n);
    cfg.put("k", o.k);
    cfg.put("index", o.index);
    cfg.put("rank", o.rank);
    cfg.put("t-max", o.t_max);
    cfg.put("points", o.points);
    cfg.put("noise", o.noise);
    cfg.put("scale", o.scale);
    cfg.put("p", o.p);
    std::string stem = artifact_stem("tails", cfg, o.c.seed);

    csv_file csv({"t", "exceed", "frequency", "bound", "std_error", "flagged"});
    int flagged = 0;
    for (const tail_row& row : table.rows) {
        flagged += row.flagged ? 1 : 0;
        csv.add_row({cell(row.t), cell(row.exceed), cell(row.frequency), cell(row.bound),
                     cell(row.std_error), cell(row.flagged)});
    }
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    ordered_json j = summary_skeleton("tails", cfg, o.c.seed);
    j["sigma_k"] = table.sigma_k;
    j["trials"] = table.trials;
    j["points"] = static_cast<int>(table.rows.size());
    j["flagged"] = flagged;
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "tails: trials=" << table.trials << " index=" << table.k << " flagged=" << flagged
              << "/" << table.rows.size() << " artifacts=" << stem << "\n";
    return 0;
}

// ---- cluster-clique ----------------------------------------------------------

struct cc_opts {
    common_opts c;
    int n = 1000;
    double q = 0.5;
    std::string sweep = "1:8";
};

CLI::App* setup_cluster_clique(CLI::App& app, cc_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "cluster-clique", "hidden-clique recovery fraction swept over c = k / sqrt(n)");
    add_common(sub, o.c, 40);
    sub->add_option("--n", o.n, "vertex count");
    sub->add_option("--q", o.q, "background edge density");
    sub->add_option("--sweep-c", o.sweep, "c range lo:hi (k = floor(c sqrt(n)))");
    return sub;
}

int run_cluster_clique(const cc_opts& o) {
    check_common(o.c);
    sweep_range sw = parse_sweep(o.sweep);

    config_echo cfg;
    echo_common(cfg, "cluster-clique", o.c);
    cfg.put("n", o.n);
    cfg.put("q", o.q);
    cfg.put("sweep-c", o.sweep);
    std::string stem = artifact_stem("cluster-clique", cfg, o.c.seed);

    csv_file csv({"c", "k", "trials", "recovered", "fraction"});
    ordered_json table = ordered_json::array();
    std::vector<double> fractions;
    for (int cval = sw.lo; cval <= sw.hi; ++cval) {
        int k = static_cast<int>(std::floor(cval * std::sqrt(static_cast<double>(o.n))));
        require(k >= 1 && k <= o.n, errc::bad_spec,
                "clique size floor(c sqrt(n)) must land in [1, n], got " + std::to_string(k));
        std::vector<char> exact(static_cast<size_t>(o.c.trials), 0);
        parallel_trials(o.c.trials, o.c.threads, [&](int t) {
            planted_graph g = sample_clique_graph(o.n, k, o.q, o.c.seed,
                                                  static_cast<std::uint32_t>(t));
            std::vector<int> sel = fsc(adjacency_transform(g.adjacency, o.q));
            std::vector<int> members;
            members.reserve(static_cast<size_t>(k));
            for (int v = 0; v < o.n; ++v)
                if (g.labels[static_cast<size_t>(v)] == 0) members.push_back(v);
            exact[static_cast<size_t>(t)] = sel == members ? 1 : 0;
        });
        int recovered = 0;
        for (char e : exact) recovered += e;
        double fraction = static_cast<double>(recovered) / o.c.trials;
        fractions.push_back(fraction);
        csv.add_row({cell(cval), cell(k), cell(o.c.trials), cell(recovered), cell(fraction)});
        table.push_back(ordered_json{
            {"c", cval}, {"k", k}, {"recovered", recovered}, {"fraction", fraction}});
    }
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    bool nondecreasing = std::is_sorted(fractions.begin(), fractions.end());
    int c_full = 0;  // smallest c from which every fraction is 1; 0 = never
    for (int pos = static_cast<int>(fractions.size()) - 1; pos >= 0; --pos) {
        if (fractions[static_cast<size_t>(pos)] == 1.0)
            c_full = sw.lo + pos;
        else
            break;
    }

    ordered_json j = summary_skeleton("cluster-clique", cfg, o.c.seed);
    j["table"] = table;
    j["nondecreasing"] = nondecreasing;
    j["c_full"] = c_full;
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "cluster-clique: n=" << o.n << " c=" << sw.lo << ".." << sw.hi << " fractions=";
    for (size_t pos = 0; pos < fractions.size(); ++pos)
        std::cout << (pos ? "," : "") << format_double(fractions[pos]);
    std::cout << " artifacts=" << stem << "\n";
    return 0;
}

// ---- cluster-partition / cluster-hidden ---------------------------------------

struct cluster_trial_row {
    int exact = 0;
    int misclassified = -1;
    int rounds = -1;
    int truncated = -1;
    std::string err;
};

// Per-trial recovery driver shared by both partition commands. Library
// errors that are legitimate per-trial outcomes (an ambiguous attachment, a
// block too small to vote) are recorded as data, not failures.
template <typename Recover>
std::vector<cluster_trial_row> cluster_trials(const partition_spec& spec, const common_opts& c,
                                              Recover&& recover) {
    std::vector<cluster_trial_row> rows(static_cast<size_t>(c.trials));
    parallel_trials(c.trials, c.threads, [&](int t) {
        planted_graph g = sample_partition_graph(spec, c.seed, static_cast<std::uint32_t>(t));
        cluster_trial_row& row = rows[static_cast<size_t>(t)];
        try {
            predicted_partition pred = recover(g, t);
            recovery_result rec = score(pred.labels, g.labels);
            row.exact = rec.exact ? 1 : 0;
            row.misclassified = rec.misclassified;
            row.rounds = static_cast<int>(pred.steps.size());
            row.truncated = static_cast<int>(pred.truncated.size());
        } catch (const error& e) {
            row.err = errc_name(e.code());
        }
    });
    return rows;
}

int write_cluster_artifacts(const std::string& command, const common_opts& c, config_echo& cfg,
                            const std::vector<cluster_trial_row>& rows) {
    std::string stem = artifact_stem(command, cfg, c.seed);
    csv_file csv({"trial", "exact", "misclassified", "rounds", "truncated", "error"});
    int exact_count = 0;
    std::map<std::string, int> errors;
    for (size_t t = 0; t < rows.size(); ++t) {
        const cluster_trial_row& row = rows[t];
        exact_count += row.exact;
        if (!row.err.empty()) errors[row.err] += 1;
        csv.add_row({cell(static_cast<int>(t)), cell(row.exact), cell(row.misclassified),
                     cell(row.rounds), cell(row.truncated), row.err});
    }
    csv.write(out_path(c.out, stem + ".csv"), cfg, c.seed);

    ordered_json j = summary_skeleton(command, cfg, c.seed);
    j["trials"] = c.trials;
    j["exact"] = exact_count;
    j["fraction"] = static_cast<double>(exact_count) / c.trials;
    j["errors"] = ordered_json::object();
    for (const auto& [name, count] : errors) j["errors"][name] = count;
    write_summary(out_path(c.out, stem + ".json"), j);

    std::cout << command << ": exact=" << exact_count << "/" << c.trials;
    int total_errors = 0;
    for (const auto& [name, count] : errors) total_errors += count;
    std::cout << " errors=" << total_errors << " artifacts=" << stem << "\n";
    return 0;
}

struct cpart_opts {
    common_opts c;
    std::string sizes = "300,270,240,190";
    std::string densities = "1,1,1,1";
    double cross = 0.3;
    double eps = 0.0;
};

CLI::App* setup_cluster_partition(CLI::App& app, cpart_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "cluster-partition", "clique-partition recovery rate on sampled graphs");
    add_common(sub, o.c, 10);
    sub->add_option("--sizes", o.sizes, "block sizes, comma list");
    sub->add_option("--densities", o.densities, "block densities, comma list (1 = clique)");
    sub->add_option("--cross", o.cross, "cross-block density");
    sub->add_option("--eps", o.eps, "truncation exponent; 0 disables the truncation draw");
    return sub;
}

int run_cluster_partition(const cpart_opts& o) {
    check_common(o.c);
    partition_spec spec{parse_int_list(o.sizes, "sizes"), parse_real_list(o.densities, "densities"),
                        o.cross};
    int r = spec.r();
    std::vector<cluster_trial_row> rows =
        cluster_trials(spec, o.c, [&](const planted_graph& g, int t) {
            return clique_partition(g, r, o.eps, o.c.seed, static_cast<std::uint32_t>(t));
        });
    config_echo cfg;
    echo_common(cfg, "cluster-partition", o.c);
    cfg.put("sizes", o.sizes);
    cfg.put("densities", o.densities);
    cfg.put("cross", o.cross);
    cfg.put("eps", o.eps);
    return write_cluster_artifacts("cluster-partition", o.c, cfg, rows);
}

struct chid_opts {
    common_opts c;
    std::string sizes = "500,500";
    std::string densities = "0.75,0.75";
    double cross = 0.5;
    double eps = 0.0;
    double cy = 0.1;
};

CLI::App* setup_cluster_hidden(CLI::App& app, chid_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "cluster-hidden", "general-density partition recovery with reference-set voting");
    add_common(sub, o.c, 10);
    sub->add_option("--sizes", o.sizes, "block sizes, comma list");
    sub->add_option("--densities", o.densities, "block densities, comma list");
    sub->add_option("--cross", o.cross, "cross-block density");
    sub->add_option("--eps", o.eps, "truncation exponent; 0 disables the truncation draw");
    sub->add_option("--cy", o.cy, "reference-set fraction per block");
    return sub;
}

int run_cluster_hidden(const chid_opts& o) {
    check_common(o.c);
    partition_spec spec{parse_int_list(o.sizes, "sizes"), parse_real_list(o.densities, "densities"),
                        o.cross};
    int r = spec.r();
    std::vector<cluster_trial_row> rows =
        cluster_trials(spec, o.c, [&](const planted_graph& g, int t) {
            return hidden_partition(g, r, o.eps, o.cy, o.c.seed, static_cast<std::uint32_t>(t));
        });
    config_echo cfg;
    echo_common(cfg, "cluster-hidden", o.c);
    cfg.put("sizes", o.sizes);
    cfg.put("densities", o.densities);
    cfg.put("cross", o.cross);
    cfg.put("eps", o.eps);
    cfg.put("cy", o.cy);
    return write_cluster_artifacts("cluster-hidden", o.c, cfg, rows);
}

// ---- complete -----------------------------------------------------------------

struct complete_opts {
    common_opts c;
    int rows = 300;
    int cols = 300;
    std::string block_rows;
    std::string block_cols;
    std::string values = "1,2;2,1";
    double p = 0.95;
    double b = 0.0;
    int rank = 2;
    double w_inf = 0.0;
    double cutoff = 0.0;
    double stability_c = 0.0;
};

CLI::App* setup_complete(CLI::App& app, complete_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "complete", "noisy matrix completion: observe, approximate, round, check recovery");
    add_common(sub, o.c, 10);
    sub->add_option("--rows", o.rows, "signal rows");
    sub->add_option("--cols", o.cols, "signal columns");
    sub->add_option("--block-rows", o.block_rows, "row block sizes; default two equal blocks");
    sub->add_option("--block-cols", o.block_cols, "column block sizes; default two equal blocks");
    sub->add_option("--values", o.values, "block values grid, rows ';'-separated");
    sub->add_option("--p", o.p, "observation density");
    sub->add_option("--b", o.b, "corruption amplitude; entries are drawn from {-b, +b}");
    sub->add_option("--rank", o.rank, "assumed rank upper bound");
    sub->add_option("--w-inf", o.w_inf, "incoherence bound on the singular vectors; 0 = unknown");
    sub->add_option("--cutoff", o.cutoff, "singular value cutoff override; 0 = derive");
    sub->add_option("--stability-c", o.stability_c,
                    "stability constant for the report; 0 = stated constant");
    return sub;
}

int run_complete(const complete_opts& o) {
    check_common(o.c);
    std::vector<int> br = o.block_rows.empty()
                              ? std::vector<int>{o.rows / 2, o.rows - o.rows / 2}
                              : parse_int_list(o.block_rows, "block-rows");
    std::vector<int> bc = o.block_cols.empty()
                              ? std::vector<int>{o.cols / 2, o.cols - o.cols / 2}
                              : parse_int_list(o.block_cols, "block-cols");
    rect_matrix values = parse_values_grid(o.values);
    require(values.rows() == static_cast<int>(br.size()) &&
                values.cols() == static_cast<int>(bc.size()),
            errc::bad_spec, "values grid must be block-rows x block-cols");
    rect_matrix a = integer_block_signal(o.rows, o.cols, br, bc, values);
    completion_config ccfg{o.rank, o.w_inf, o.cutoff};
    ccfg.validate();

    struct trial_result {
        int s_tilde = 0;
        double cutoff = 0.0;
        recovery_report rep;
    };
    std::vector<trial_result> outs(static_cast<size_t>(o.c.trials));
    std::vector<std::array<long long, 21>> hists(static_cast<size_t>(o.c.trials));
    rect_matrix first_rounded;
    parallel_trials(o.c.trials, o.c.threads, [&](int t) {
        rect_matrix x = draw_corruption(o.rows, o.cols, o.b, o.c.seed,
                                        static_cast<std::uint32_t>(t));
        observation_model model{o.p, o.c.seed, static_cast<std::uint32_t>(t)};
        completion_output out = complete_noisy(a, x, model, ccfg);
        trial_result& res = outs[static_cast<size_t>(t)];
        res.s_tilde = out.s_tilde;
        res.cutoff = out.cutoff;
        res.rep = check_recovery(a, out.approx);
        std::array<long long, 21>& hist = hists[static_cast<size_t>(t)];
        hist.fill(0);
        for (int i = 0; i < o.rows; ++i)
            for (int j = 0; j < o.cols; ++j) {
                double err = std::abs(a(i, j) - out.approx(i, j));
                hist[err >= 1.0 ? 20 : static_cast<size_t>(err / 0.05)] += 1;
            }
        if (t == 0) first_rounded = out.rounded;
    });

    config_echo cfg;
    echo_common(cfg, "complete", o.c);
    cfg.put("rows", o.rows);
    cfg.put("cols", o.cols);
    cfg.put("block-rows", o.block_rows.empty() ? "half" : o.block_rows);
    cfg.put("block-cols", o.block_cols.empty() ? "half" : o.block_cols);
    cfg.put("values", o.values);
    cfg.put("p", o.p);
    cfg.put("b", o.b);
    cfg.put("rank", o.rank);
    cfg.put("w-inf", o.w_inf);
    cfg.put("cutoff", o.cutoff);
    cfg.put("stability-c", o.stability_c);
    std::string stem = artifact_stem("complete", cfg, o.c.seed);

    csv_file csv({"trial", "s_tilde", "cutoff", "exact", "wrong_entries",
                  "max_abs_err_preround", "half_ties"});
    int exact_count = 0;
    double worst = 0.0;
    ordered_json s_tilde_list = ordered_json::array();
    for (int t = 0; t < o.c.trials; ++t) {
        const trial_result& res = outs[static_cast<size_t>(t)];
        exact_count += res.rep.exact ? 1 : 0;
        worst = std::max(worst, res.rep.max_abs_err_prerounding);
        s_tilde_list.push_back(res.s_tilde);
        csv.add_row({cell(t), cell(res.s_tilde), cell(res.cutoff), cell(res.rep.exact),
                     cell(res.rep.wrong_entries), cell(res.rep.max_abs_err_prerounding),
                     cell(res.rep.half_ties)});
    }
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    csv_file hist_csv({"bin_lo", "bin_hi", "count"});
    for (int bin = 0; bin <= 20; ++bin) {
        long long count = 0;
        for (const auto& hist : hists) count += hist[static_cast<size_t>(bin)];
        double lo = 0.05 * bin;
        double hi = bin == 20 ? std::numeric_limits<double>::infinity() : 0.05 * (bin + 1);
        hist_csv.add_row({cell(lo), cell(hi), cell(count)});
    }
    hist_csv.write(out_path(o.c.out, stem + "-hist.csv"), cfg, o.c.seed);
    save_matrix(out_path(o.c.out, stem + "-matrix.txt"), first_rounded,
                provenance(cfg, o.c.seed));

    // Stability report on the exact signal: parameters from the stated
    // recipe, verdicts at the chosen constant (the rectangular summary is
    // the one with nonzero gaps; the symmetrized spectrum pairs +-sigma).
    mc_stability st = mc_stability_params(a, o.rank, o.p, o.b);
    signal_summary summary = summarize_rect_signal(spectral_decompose(symmetrize(a)), o.rank,
                                                   o.rows, o.cols);
    double sc = o.stability_c > 0.0 ? o.stability_c : st.c;
    ordered_json verdicts = ordered_json::array();
    for (int i = 1; i <= o.rank; ++i) {
        stability_report rep = stability_check(summary, i, st.t, st.k_entry, sc, st.nu);
        ordered_json item = stability_json(rep);
        item["i"] = i;
        verdicts.push_back(item);
    }

    ordered_json j = summary_skeleton("complete", cfg, o.c.seed);
    j["exact"] = exact_count;
    j["trials"] = o.c.trials;
    j["worst_preround"] = worst;
    j["cutoff"] = outs[0].cutoff;
    j["cutoff_mode"] = cutoff_mode_name(ccfg.mode());
    j["s_tilde"] = s_tilde_list;
    j["stability"] = ordered_json{{"c", sc},       {"stated_c", st.c}, {"tau", st.tau},
                                  {"nu", st.nu},   {"k_entry", st.k_entry},
                                  {"T", st.t},     {"verdicts", verdicts}};
    j["artifacts"] = ordered_json{{"csv", stem + ".csv"},
                                  {"summary", stem + ".json"},
                                  {"histogram", stem + "-hist.csv"},
                                  {"matrix", stem + "-matrix.txt"}};
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "complete: exact=" << exact_count << "/" << o.c.trials
              << " worst_preround=" << format_double(worst)
              << " cutoff=" << format_double(outs[0].cutoff)
              << " mode=" << cutoff_mode_name(ccfg.mode()) << " artifacts=" << stem << "\n";
    return 0;
}

// ---- bounds-report ---------------------------------------------------------------

struct br_opts {
    common_opts c;
    std::string model = "clique";
    int n = 1000;
    int k = 250;
    std::string sizes = "200,200";
    std::string densities = "0.9,0.6";
    double cross = 0.5;
    int rank = 0;
    std::string noise = "rademacher";
    double scale = 1.0;
    double p = 0.5;
    double tau = 0.05;
    double c_bvh = 1.0;
    std::string tmode = "analytic";
    double stability_c = 1.0;
    double nu = 1.0;
};

CLI::App* setup_bounds_report(CLI::App& app, br_opts& o) {
    CLI::App* sub = app.add_subcommand(
        "bounds-report", "constants, noise level, and per-index stability for one signal model");
    add_common(sub, o.c, 200);
    sub->add_option("--model", o.model, "signal family: clique or partition");
    sub->add_option("--n", o.n, "ambient dimension (clique model)");
    sub->add_option("--k", o.k, "clique size (clique model)");
    sub->add_option("--sizes", o.sizes, "block sizes, comma list (partition model)");
    sub->add_option("--densities", o.densities, "block densities, comma list (partition model)");
    sub->add_option("--cross", o.cross, "cross-block density (partition model)");
    sub->add_option("--rank", o.rank, "components to report; 0 = model default");
    sub->add_option("--noise", o.noise, "rademacher, truncated_gaussian, or centered_edge");
    sub->add_option("--scale", o.scale, "noise amplitude");
    sub->add_option("--p", o.p, "edge density for centered_edge noise");
    sub->add_option("--tau", o.tau, "failure budget for the noise-level estimate");
    sub->add_option("--c-bvh", o.c_bvh, "constant in the analytic norm estimate");
    sub->add_option("--t-mode", o.tmode, "noise-level estimate: analytic or monte_carlo");
    sub->add_option("--stability-c", o.stability_c, "stability constant");
    sub->add_option("--nu", o.nu, "stability log exponent");
    return sub;
}

int run_bounds_report(const br_opts& o) {
    check_common(o.c);
    model_signal ms =
        build_model_signal(o.model, o.n, o.k, o.sizes, o.densities, o.cross, o.rank, o.c.seed);
    int n = ms.a.n();
    noise_spec ns = make_noise(o.noise, o.scale, o.p, o.c.seed);
    double K = ns.resolved_k(n);
    t_mode mode;
    if (o.tmode == "analytic")
        mode = t_mode::analytic;
    else if (o.tmode == "monte_carlo")
        mode = t_mode::monte_carlo;
    else
        fail(errc::bad_spec, "t-mode must be analytic or monte_carlo, got '" + o.tmode + "'");

    spectral_decomposition d = spectral_decompose(ms.a);
    signal_summary s = summarize_signal(d, ms.rank);
    t_estimate te = estimate_T(ns, n, o.tau, o.c.trials, mode, o.c_bvh);
    double ovw = ovw_l2(K, ms.rank, s.delta_at(1), s.sigma_at(1), te.T);

    config_echo cfg;
    echo_common(cfg, "bounds-report", o.c);
    cfg.put("model", o.model);
    cfg.put("n", o.n);
    cfg.put("k", o.k);
    cfg.put("sizes", o.sizes);
    cfg.put("densities", o.densities);
    cfg.put("cross", o.cross);
    cfg.put("rank", ms.rank);
    cfg.put("noise", o.noise);
    cfg.put("scale", o.scale);
    cfg.put("p", o.p);
    cfg.put("tau", o.tau);
    cfg.put("c-bvh", o.c_bvh);
    cfg.put("t-mode", o.tmode);
    cfg.put("stability-c", o.stability_c);
    cfg.put("nu", o.nu);
    std::string stem = artifact_stem("bounds-report", cfg, o.c.seed);

    csv_file csv({"i", "sigma", "delta", "kappa", "degenerate", "dk_bound_at_T", "verdict",
                  "margin_a", "margin_b", "margin_c", "margin_strong"});
    ordered_json indices = ordered_json::array();
    std::string verdict_1;
    for (int i = 1; i <= ms.rank; ++i) {
        stability_report rep = stability_check(s, i, te.T, K, o.stability_c, o.nu);
        if (i == 1) verdict_1 = rep.verdict;
        bound_value dk = davis_kahan(te.T, s.delta_at(i));
        csv.add_row({cell(i), cell(s.sigma_at(i)), cell(s.delta_at(i)), cell(s.kappa_at(i)),
                     cell(s.degenerate_at(i)), cell(dk.value), rep.verdict, cell(rep.margin_a),
                     cell(rep.margin_b), cell(rep.margin_c), cell(rep.margin_strong)});
        ordered_json item = stability_json(rep);
        item["i"] = i;
        item["sigma"] = s.sigma_at(i);
        item["delta"] = s.delta_at(i);
        item["kappa"] = s.kappa_at(i);
        item["dk_bound_at_T"] = dk.ok ? ordered_json(dk.value) : ordered_json(nullptr);
        indices.push_back(item);
    }
    csv.write(out_path(o.c.out, stem + ".csv"), cfg, o.c.seed);

    ordered_json j = summary_skeleton("bounds-report", cfg, o.c.seed);
    j["n"] = n;
    j["rank"] = ms.rank;
    j["K"] = K;
    j["u_inf"] = s.u_inf;
    j["noise_level"] = ordered_json{
        {"T", te.T}, {"mode", t_mode_name(te.mode)}, {"trials", te.trials}};
    j["ovw_l2_at_T"] = ovw;
    j["constants"] = ordered_json{
        {"coordinate_c0", constants::coordinate_c0(ms.rank)},
        {"coordinate_inner_c", constants::coordinate_inner_c(ms.rank)},
        {"delocalization_c1", constants::delocalization_c1(ms.rank)},
        {"row_growth_c", constants::row_growth_c(ms.rank)},
        {"linf_main_c", constants::linf_main_c(1.0, ms.rank)},
        {"linf_refined_c", constants::linf_refined_c(1.0, ms.rank)},
        {"completion_stability_c", constants::completion_stability_c(ms.rank)}};
    j["indices"] = indices;
    write_summary(out_path(o.c.out, stem + ".json"), j);

    std::cout << "bounds-report: n=" << n << " rank=" << ms.rank
              << " T=" << format_double(te.T) << " verdict_1=" << verdict_1
              << " artifacts=" << stem << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    try {
        std::vector<std::string> args(argv + 1, argv + argc);

        // --config is handled before CLI11 sees the tokens: the file's
        // values are injected ahead of the user's own flags, so the command
        // line always wins.
        std::string config_path;
        for (auto it = args.begin(); it != args.end();) {
            if (*it == "--config") {
                require(std::next(it) != args.end(), errc::bad_spec,
                        "--config needs a file path");
                config_path = *std::next(it);
                it = args.erase(it, std::next(it, 2));
            } else if (it->rfind("--config=", 0) == 0) {
                config_path = it->substr(9);
                it = args.erase(it);
            } else {
                ++it;
            }
        }

        CLI::App app{"seeded spectral-recovery experiments with reproducible artifacts", "svp"};
        app.require_subcommand(1);
        app.set_version_flag("--version", "svp 0.1.0");
        std::string config_doc;
        app.add_option("--config", config_doc,
                       "key = value file with [command] sections; command-line flags win")
            ->type_name("FILE");

        perturb_opts po;
        det_opts dopt;
        tails_opts to;
        cc_opts cco;
        cpart_opts cpo;
        chid_opts cho;
        complete_opts mo;
        br_opts bo;
        std::map<std::string, CLI::App*> subs;
        subs["perturb-verify"] = setup_perturb(app, po);
        subs["det-verify"] = setup_det(app, dopt);
        subs["tails"] = setup_tails(app, to);
        subs["cluster-clique"] = setup_cluster_clique(app, cco);
        subs["cluster-partition"] = setup_cluster_partition(app, cpo);
        subs["cluster-hidden"] = setup_cluster_hidden(app, cho);
        subs["complete"] = setup_complete(app, mo);
        subs["bounds-report"] = setup_bounds_report(app, bo);

        if (!config_path.empty()) {
            config_file cf = parse_config_file(config_path);
            validate_config(cf, subs);
            if (!args.empty() && subs.count(args[0]) != 0) args = merge_config(cf, args);
        }

        std::vector<const char*> cargv;
        cargv.reserve(args.size() + 1);
        cargv.push_back("svp");
        for (const std::string& a : args) cargv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargv.size()), cargv.data());
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 1;
        }

        if (subs["perturb-verify"]->parsed()) return run_perturb(po);
        if (subs["det-verify"]->parsed()) return run_det(dopt);
        if (subs["tails"]->parsed()) return run_tails(to);
        if (subs["cluster-clique"]->parsed()) return run_cluster_clique(cco);
        if (subs["cluster-partition"]->parsed()) return run_cluster_partition(cpo);
        if (subs["cluster-hidden"]->parsed()) return run_cluster_hidden(cho);
        if (subs["complete"]->parsed()) return run_complete(mo);
        if (subs["bounds-report"]->parsed()) return run_bounds_report(bo);
        return 1;
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace svp
