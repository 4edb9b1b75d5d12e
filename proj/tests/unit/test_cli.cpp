#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kBin = RIGIDNET_BIN;
const std::string kConfigs = RIGIDNET_CONFIGS;

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "stdout.txt";
    const std::string cmd = "cd '" + dir.string() + "' && '" + kBin + "' " + args + " > '" + log.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// data rows of a csv, provenance lines skipped
std::vector<std::vector<std::string>> rows(const fs::path& p) {
    std::vector<std::vector<std::string>> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("rigidnet_cli_" + std::to_string(std::rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("validate echoes the canonical document") {
    TempDir d;
    const Run r = run("validate " + kConfigs + "/line4.json", d.path);
    CHECK(r.status == 0);
    CHECK(r.out.find("\"single_node_exponential\"") != std::string::npos);
    // the echo is itself a valid document
    std::ofstream(d.path / "echo.json") << r.out;
    CHECK(run("validate echo.json", d.path).status == 0);
}

TEST_CASE("exit codes for bad input") {
    TempDir d;
    CHECK(run("validate missing.json", d.path).status == 2);
    CHECK(run("validate " + kConfigs + "/line4.json --no-such-flag", d.path).status == 2);
    CHECK(run("", d.path).status == 2);
    std::ofstream(d.path / "broken.json") << "{\"n\": 2,\n \"A\": [[0, 1.5], [0, 0]], \"gamma\": [0.5, 0.5], \"theta\": 0}";
    const Run bad = run("validate broken.json", d.path);
    CHECK(bad.status == 1);
    CHECK(bad.out.find("ColumnSumViolation") != std::string::npos);
    std::ofstream(d.path / "syntax.json") << "{\"n\": 2,\n \"A\": [[0, 1.5], [0, 0]\n";
    const Run syn = run("validate syntax.json", d.path);
    CHECK(syn.status == 1);
    CHECK(syn.out.find("syntax.json:") != std::string::npos);
}

TEST_CASE("equilibrium writes the cost of debt") {
    TempDir d;
    const Run r = run("equilibrium " + kConfigs + "/line4.json --out o", d.path);
    REQUIRE(r.status == 0);
    const std::string csv = slurp(d.path / "o" / "equilibrium.csv");
    CHECK(csv.find("# seed=42") != std::string::npos);
    CHECK(csv.find("# command=equilibrium") != std::string::npos);
    const auto t = rows(d.path / "o" / "equilibrium.csv");
    REQUIRE(t.size() == 5);
    CHECK(t[0][0] == "sector");
    CHECK(t[0][2] == "zeta");
    CHECK(std::stod(t[2][2]) == doctest::Approx(0.5473).epsilon(1e-3));
    CHECK(std::stod(t[1][2]) == 0.0);
    CHECK(fs::exists(d.path / "o" / "equilibrium.json"));

    // --theta overrides the document
    REQUIRE(run("equilibrium " + kConfigs + "/line4.json --theta 1 --out f", d.path).status == 0);
    CHECK(std::stod(rows(d.path / "f" / "equilibrium.csv")[2][2]) == doctest::Approx(0.7657).epsilon(1e-3));
}

TEST_CASE("defaults and sweep") {
    TempDir d;
    REQUIRE(run("defaults " + kConfigs + "/line4.json --eta-o -10 --out o", d.path).status == 0);
    const auto t = rows(d.path / "o" / "defaults.csv");
    REQUIRE(t.size() == 5);
    CHECK(t[1][1] == "NEVER");
    for (int k = 2; k <= 4; ++k) {
        CHECK(t[static_cast<std::size_t>(k)][1] == "DEFAULT");
        CHECK(t[static_cast<std::size_t>(k)].back() == "1");
    }
    CHECK(fs::exists(d.path / "o" / "thresholds.json"));

    REQUIRE(run("sweep " + kConfigs + "/cycle4.json --sector 2 --theta-grid 0:1:0.25 --out s", d.path).status == 0);
    const auto s = rows(d.path / "s" / "sweep.csv");
    REQUIRE(s.size() == 21);  // four sectors at five leverage values
    CHECK(s[2][1] == "2");
    CHECK(std::stod(s[2][2]) == 0.0);  // no leverage, no cost of debt
}

TEST_CASE("simulate writes reports and histograms") {
    TempDir d;
    REQUIRE(run("simulate " + kConfigs + "/line4.json --draws 20000 --bins 16 --out o", d.path).status == 0);
    for (const char* f : {"summary.csv", "cascades.csv", "report.json", "hist_tau_2.dat", "hist_profit_4.dat"})
        CHECK(fs::exists(d.path / "o" / f));
    CHECK(slurp(d.path / "o" / "summary.csv").find("# num_draws=20000") != std::string::npos);
}
