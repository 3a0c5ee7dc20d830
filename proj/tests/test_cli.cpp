#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "svp/matrix.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("SVP_CLI_PATH")) return env;
    return SVP_CLI_PATH;
}

struct run_result {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Runs the binary through the shell, capturing both streams. Tests only
// ever pass fixed strings, so no quoting is needed beyond whole-argument
// quoting.
run_result run_cli(const std::vector<std::string>& args) {
    std::string cmd = "'" + cli_path() + "'";
    for (const std::string& a : args) cmd += " '" + a + "'";
    cmd += " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    run_result r;
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// One scratch dir per test case, wiped on entry so reruns start clean.
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "svp-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path only_file(const fs::path& dir, const std::string& ext) {
    fs::path found;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ext) {
            REQUIRE(found.empty());
            found = e.path();
        }
    }
    REQUIRE(!found.empty());
    return found;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

TEST_CASE("help lists every command and exits zero") {
    run_result r = run_cli({"--help"});
    CHECK(r.exit_code == 0);
    for (const char* cmd : {"perturb-verify", "det-verify", "tails", "cluster-clique",
                            "cluster-partition", "cluster-hidden", "complete", "bounds-report"})
        CHECK_MESSAGE(r.output.find(cmd) != std::string::npos, cmd);
}

TEST_CASE("usage errors exit one") {
    CHECK(run_cli({}).exit_code == 1);                       // missing subcommand
    CHECK(run_cli({"no-such-command"}).exit_code == 1);      // unknown command
    CHECK(run_cli({"tails", "--points", "0"}).exit_code == 1);
    run_result bad = run_cli({"cluster-partition", "--densities", "0.5,1.5", "--trials", "1"});
    CHECK(bad.exit_code == 1);
}

TEST_CASE("rerun with identical config and seed is byte-identical") {
    fs::path a = scratch("rerun-a");
    fs::path b = scratch("rerun-b");
    std::vector<std::string> base = {"det-verify", "--trials", "5", "--seed",
                                     "11",         "--n",      "60"};
    auto with_out = [&](const fs::path& dir) {
        std::vector<std::string> v = base;
        v.insert(v.end(), {"--out", dir.string()});
        return v;
    };
    CHECK(run_cli(with_out(a)).exit_code == 0);
    CHECK(run_cli(with_out(b)).exit_code == 0);
    fs::path csv_a = only_file(a, ".csv");
    fs::path csv_b = only_file(b, ".csv");
    CHECK(csv_a.filename() == csv_b.filename());  // same config hash
    CHECK(slurp(csv_a) == slurp(csv_b));
    // Same dir, run again: the JSON reproduces too.
    CHECK(run_cli(with_out(a)).exit_code == 0);
    CHECK(slurp(only_file(a, ".json")) == slurp(only_file(a, ".json")));
}

TEST_CASE("worker count does not change results") {
    fs::path one = scratch("threads-1");
    fs::path four = scratch("threads-4");
    run_result r1 = run_cli({"perturb-verify", "--n", "120", "--k", "30", "--trials", "8",
                             "--seed", "3", "--out", one.string()});
    run_result r4 = run_cli({"perturb-verify", "--n", "120", "--k", "30", "--trials", "8",
                             "--seed", "3", "--threads", "4", "--out", four.string()});
    CHECK(r1.exit_code == 0);
    CHECK(r4.exit_code == 0);
    CHECK(slurp(only_file(one, ".csv")) == slurp(only_file(four, ".csv")));
}

TEST_CASE("artifacts carry the provenance line and stem") {
    fs::path dir = scratch("provenance");
    run_result r = run_cli(
        {"tails", "--trials", "500", "--seed", "9", "--points", "4", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    fs::path csv = only_file(dir, ".csv");
    std::string name = csv.filename().string();
    CHECK(name.rfind("tails-", 0) == 0);
    CHECK(name.find("-9.csv") != std::string::npos);
    std::vector<std::string> lines = csv_lines(slurp(csv));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0].rfind("# artifact_version=1 config_hash=", 0) == 0);
    CHECK(lines[0].find("seed=9") != std::string::npos);
    CHECK(lines[1] == "t,exceed,frequency,bound,std_error,flagged");
    CHECK(lines.size() == 2 + 4);  // provenance + header + one row per grid point

    json j = json::parse(slurp(only_file(dir, ".json")));
    CHECK(j["artifact_version"] == 1);
    CHECK(j["seed"] == 9);
    std::string hash = j["config_hash"];
    CHECK(hash.size() == 16);
    CHECK(name.find(hash) != std::string::npos);
}

TEST_CASE("config file supplies values and flags override them") {
    fs::path dir = scratch("config-merge");
    fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# pilot defaults\n"
               "seed = 21\n"
               "trials = 3\n"
               "\n"
               "[complete]\n"
               "rows = 80\n"
               "cols = 80\n"
               "p = 0.9\n";
    }
    SUBCASE("config alone") {
        run_result r = run_cli({"complete", "--config", cfg.string(), "--out", dir.string()});
        CHECK(r.exit_code == 0);
        json j = json::parse(slurp(only_file(dir, ".json")));
        CHECK(j["seed"] == 21);
        CHECK(j["config"]["rows"] == "80");
        CHECK(j["config"]["p"] == "0.90000000000000002");
        CHECK(j["config"]["trials"] == "3");
    }
    SUBCASE("flag wins over config") {
        run_result r = run_cli({"complete", "--config", cfg.string(), "--p", "0.98", "--seed",
                                "22", "--out", dir.string()});
        CHECK(r.exit_code == 0);
        json j = json::parse(slurp(only_file(dir, ".json")));
        CHECK(j["seed"] == 22);
        CHECK(j["config"]["p"] == "0.97999999999999998");
        CHECK(j["config"]["rows"] == "80");  // untouched keys survive
    }
}

TEST_CASE("config files with unknown keys or sections are rejected") {
    fs::path dir = scratch("config-reject");
    auto write = [&](const char* name, const char* body) {
        fs::path p = dir / name;
        std::ofstream out(p);
        out << body;
        return p;
    };
    fs::path bad_key = write("bad-key.cfg", "[complete]\nbogus = 3\n");
    run_result r1 = run_cli({"complete", "--config", bad_key.string(), "--out", dir.string()});
    CHECK(r1.exit_code == 1);
    CHECK(r1.output.find("bogus") != std::string::npos);

    fs::path bad_section = write("bad-section.cfg", "[nonsense]\np = 1\n");
    run_result r2 =
        run_cli({"complete", "--config", bad_section.string(), "--out", dir.string()});
    CHECK(r2.exit_code == 1);
    CHECK(r2.output.find("nonsense") != std::string::npos);

    fs::path bad_global = write("bad-global.cfg", "model = clique\n");
    run_result r3 =
        run_cli({"complete", "--config", bad_global.string(), "--out", dir.string()});
    CHECK(r3.exit_code == 1);

    run_result r4 = run_cli({"complete", "--config", (dir / "missing.cfg").string()});
    CHECK(r4.exit_code == 1);
}

TEST_CASE("det-verify exit codes separate clean runs from violations") {
    fs::path clean_dir = scratch("det-exit-clean");
    fs::path inject_dir = scratch("det-exit-inject");
    run_result clean = run_cli({"det-verify", "--trials", "3", "--seed", "1", "--n", "50",
                                "--out", clean_dir.string()});
    CHECK(clean.exit_code == 0);
    json jc = json::parse(slurp(only_file(clean_dir, ".json")));
    CHECK(jc["verdict"] == "sound");
    CHECK(jc["violations"] == 0);

    run_result injected = run_cli({"det-verify", "--trials", "3", "--seed", "1", "--n", "50",
                                   "--inject-violation", "--out", inject_dir.string()});
    CHECK(injected.exit_code == 2);
    json ji = json::parse(slurp(only_file(inject_dir, ".json")));
    CHECK(ji["injected"] == true);
    CHECK(ji["verdict"] == "violated");
}

TEST_CASE("cluster-clique emits one row per swept c with sane fractions") {
    fs::path dir = scratch("clique-sweep");
    run_result r = run_cli({"cluster-clique", "--n", "300", "--sweep-c", "2:4", "--trials", "3",
                            "--seed", "47", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    std::vector<std::string> lines = csv_lines(slurp(only_file(dir, ".csv")));
    REQUIRE(lines.size() == 2 + 3);
    CHECK(lines[1] == "c,k,trials,recovered,fraction");
    for (size_t row = 2; row < lines.size(); ++row) {
        std::vector<std::string> cells = split_cells(lines[row]);
        REQUIRE(cells.size() == 5);
        int c = std::stoi(cells[0]);
        int k = std::stoi(cells[1]);
        double frac = std::stod(cells[4]);
        CHECK(c == static_cast<int>(row));  // 2, 3, 4
        CHECK(k == static_cast<int>(c * std::sqrt(300.0)));
        CHECK(frac >= 0.0);
        CHECK(frac <= 1.0);
    }
}

TEST_CASE("complete writes all four artifacts and they agree") {
    fs::path dir = scratch("complete-artifacts");
    run_result r = run_cli({"complete", "--rows", "60", "--cols", "60", "--p", "1", "--trials",
                            "2", "--seed", "5", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    json j = json::parse(slurp(only_file(dir, ".json")));
    CHECK(j["exact"] == 2);  // every entry observed: recovery must be exact

    // Histogram pools one count per matrix entry per trial.
    fs::path hist;
    fs::path matrix;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name.find("-hist.csv") != std::string::npos) hist = e.path();
        if (name.find("-matrix.txt") != std::string::npos) matrix = e.path();
    }
    REQUIRE(!hist.empty());
    REQUIRE(!matrix.empty());
    std::vector<std::string> hlines = csv_lines(slurp(hist));
    REQUIRE(hlines.size() == 2 + 21);
    long long total = 0;
    for (size_t row = 2; row < hlines.size(); ++row)
        total += std::stoll(split_cells(hlines[row])[2]);
    CHECK(total == 60LL * 60 * 2);

    // The matrix sidecar embeds provenance yet still round-trips through
    // the library loader, and matches the planted block values.
    CHECK(slurp(matrix).rfind("# artifact_version=1 config_hash=", 0) == 0);
    svp::rect_matrix m = svp::load_rect_matrix(matrix.string());
    CHECK(m.rows() == 60);
    CHECK(m.cols() == 60);
    CHECK(m(0, 0) == doctest::Approx(1.0));
    CHECK(m(0, 59) == doctest::Approx(2.0));
    CHECK(m(59, 0) == doctest::Approx(2.0));
    CHECK(m(59, 59) == doctest::Approx(1.0));
}

TEST_CASE("summary line goes to stdout") {
    fs::path dir = scratch("summary-line");
    run_result r = run_cli({"bounds-report", "--model", "clique", "--n", "80", "--k", "20",
                            "--seed", "2", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("bounds-report:") != std::string::npos);
    CHECK(r.output.find("artifacts=") != std::string::npos);
}
