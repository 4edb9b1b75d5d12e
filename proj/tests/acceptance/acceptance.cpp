// Acceptance checks. Each criterion prints one PASS/FAIL line, followed by
// indented details for anything that failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rigidnet/scenarios.hpp"
#include "support/property_suite.hpp"

using namespace rigidnet;

namespace {

constexpr std::uint64_t kDraws = 1'000'000;
constexpr std::uint64_t kSeed = 42;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        details.push_back(what);
    }
};

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

// Checks every cell; returns the number that passed.
int check_table(const TableResult& t, Outcome& out) {
    int passed = 0;
    for (const TableCell& c : t.cells) {
        if (c.pass()) {
            ++passed;
            continue;
        }
        out.require(false, c.provenance + ": computed " + num(c.value, 6) + ", published " + num(c.reference, 6) +
                               ", tolerance " + num(c.tolerance, 3));
    }
    return passed;
}

void time_limit(Outcome& out, const std::string& what, double seconds, double limit) {
    out.require(seconds < limit, what + " took " + num(seconds, 3) + " s, limit " + num(limit, 3) + " s");
}

Outcome criterion1() {
    Outcome out;
    Stopwatch analytic_clock;
    Reproducer analytic(ReproduceOptions{kDraws, kSeed, Backend::AnalyticExponential});
    const TableResult a = analytic.reproduce("2");
    const double analytic_s = analytic_clock.seconds();
    out.require(a.cells.size() == 32, "expected 32 cells, found " + std::to_string(a.cells.size()));
    const int pa = check_table(a, out);
    time_limit(out, "analytic backend", analytic_s, 1.0);

    Stopwatch mc_clock;
    Reproducer mc(ReproduceOptions{kDraws, kSeed, Backend::MonteCarlo});
    const TableResult m = mc.reproduce("2");
    const double mc_s = mc_clock.seconds();
    const int pm = check_table(m, out);
    time_limit(out, "Monte Carlo backend", mc_s, 30.0);

    out.summary = "table 2: analytic " + std::to_string(pa) + "/" + std::to_string(a.cells.size()) + " in " +
                  num(analytic_s, 3) + " s, Monte Carlo " + std::to_string(pm) + "/" +
                  std::to_string(m.cells.size()) + " in " + num(mc_s, 3) + " s";
    return out;
}

Outcome criterion2() {
    Outcome out;
    Stopwatch clock;
    Reproducer r(ReproduceOptions{kDraws, kSeed, Backend::AnalyticExponential});
    const TableResult t1 = r.reproduce("1");
    const TableResult t5 = r.reproduce("5");
    const double s = clock.seconds();
    const int p1 = check_table(t1, out);
    const int p5 = check_table(t5, out);
    time_limit(out, "tables 1 and 5", s, 1.0);
    out.summary = "table 1 " + std::to_string(p1) + "/" + std::to_string(t1.cells.size()) + ", table 5 " +
                  std::to_string(p5) + "/" + std::to_string(t5.cells.size()) + " in " + num(s, 3) + " s";
    return out;
}

Outcome criterion3() {
    Outcome out;
    Stopwatch clock;
    Reproducer r(ReproduceOptions{kDraws, kSeed, Backend::AnalyticExponential});
    const TableResult t4 = r.reproduce("4");
    const TableResult t8 = r.reproduce("8");
    const SimulationReport& line = r.campaign(Topology::Line, 1.0);
    const double s = clock.seconds();
    const int p4 = check_table(t4, out);
    const int p8 = check_table(t8, out);

    const double lambda = r.setup().lambda;
    const double closed = std::pow(lambda / (1.0 + lambda), lambda);
    const double gap = std::abs(line.default_prob(1) - closed);
    const double se = line.default_prob_se(1);
    out.require(gap <= 4.0 * se, "closed form " + num(closed, 6) + " vs Monte Carlo " +
                                     num(line.default_prob(1), 6) + " (SE " + num(se, 3) + ")");
    time_limit(out, "default probabilities", s, 60.0);
    out.summary = "table 4 " + std::to_string(p4) + "/" + std::to_string(t4.cells.size()) + ", table 8 " +
                  std::to_string(p8) + "/" + std::to_string(t8.cells.size()) + ", closed form gap " +
                  num(gap / se, 3) + " SE, " + num(s, 3) + " s";
    return out;
}

Outcome criterion4() {
    Outcome out;
    Reproducer r(ReproduceOptions{kDraws, kSeed, Backend::AnalyticExponential});
    const TableResult t3 = r.reproduce("3");
    const TableResult t7 = r.reproduce("7");
    const int p3 = check_table(t3, out);
    const int p7 = check_table(t7, out);
    double worst = 0.0;
    for (Topology topo : {Topology::Line, Topology::Cycle})
        for (double theta : {0.5, 1.0}) {
            const SimulationReport& c = r.campaign(topo, theta);
            for (Eigen::Index k = 0; k < c.profit_mean.size(); ++k) {
                const double m = std::abs(c.profit_mean(k));
                const double se = c.profit_mean_se(k);
                // an unshocked sector has exactly zero profit on every draw
                const bool ok = se > 0.0 ? m <= 3.0 * se : m <= 1e-12;
                if (se > 0.0) worst = std::max(worst, m / se);
                out.require(ok, to_string(topo) + " theta=" + num(theta) + " k=" + std::to_string(k + 1) +
                                    ": mean profit " + num(c.profit_mean(k), 3) + " (SE " + num(se, 3) + ")");
            }
        }
    out.summary = "table 3 " + std::to_string(p3) + "/" + std::to_string(t3.cells.size()) + ", table 7 " +
                  std::to_string(p7) + "/" + std::to_string(t7.cells.size()) +
                  ", largest mean profit " + num(worst, 3) + " SE";
    return out;
}

Outcome criterion5() {
    Outcome out;
    Reproducer r(ReproduceOptions{kDraws, kSeed, Backend::AnalyticExponential});
    const TableResult t = r.reproduce("cycle-minus-line");
    const int p = check_table(t, out);
    out.summary = "cycle minus line " + std::to_string(p) + "/" + std::to_string(t.cells.size());
    return out;
}

Outcome criterion6() {
    Outcome out;
    Stopwatch clock;
    testing::InvariantReport rep = testing::run_property_suite(200, 20240601);
    const double s = clock.seconds();
    int passed = 0;
    const char* labels[] = {"(a)", "(b)", "(c)", "(d)", "(e)", "(f)", "(g)"};
    int i = 0;
    for (const testing::Check* c : rep.all()) {
        const std::string label = std::string(labels[i++]) + " " + c->name;
        if (c->ok()) ++passed;
        out.require(c->ok(), label + ": " + std::to_string(c->failures) + " of " + std::to_string(c->evaluated) +
                                 " checks failed");
        for (const std::string& n : c->notes) out.details.push_back("  " + n);
    }
    time_limit(out, "property suite", s, 120.0);
    out.summary = std::to_string(passed) + "/7 properties on 200 economies in " + num(s, 3) +
                  " s, smallest slack with costly debt " + num(rep.min_slack_nonzero_zeta, 3) + ", " +
                  std::to_string(rep.hulten_exempt) + " economies with psi v_zeta = v0 exempt from (f)";
    return out;
}

Outcome criterion7() {
    Outcome out;
    const testing::WalkReport rep = testing::run_walk_oracle(20, 99);
    out.require(rep.agreement.ok(), std::to_string(rep.agreement.failures) + " disagreements");
    for (const std::string& n : rep.agreement.notes) out.details.push_back("  " + n);
    out.summary = std::to_string(rep.agreement.evaluated) + " comparisons on 20 economies";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-7)")->check(CLI::Range(1, 7));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7};
    bool all = true;
    for (int c = 1; c <= 7; ++c) {
        if (only != 0 && c != only) continue;
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(c - 1)]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("error: ") + e.what();
        }
        std::printf("criterion %d: %s  %s\n", c, o.pass ? "PASS" : "FAIL", o.summary.c_str());
        for (const std::string& d : o.details) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
