// rigidnet command-line front end.
//
// Exit status: 0 success, 1 validation or acceptance failure, 2 usage error
// or missing input file.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rigidnet/defaults.hpp"
#include "rigidnet/errors.hpp"
#include "rigidnet/io.hpp"
#include "rigidnet/parallel.hpp"
#include "rigidnet/scenarios.hpp"

namespace fs = std::filesystem;
using namespace rigidnet;

namespace {

using Header = std::vector<std::pair<std::string, std::string>>;

struct Overrides {
    std::string backend;
    double theta = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t draws = 0;
    std::uint64_t seed = 0;
    bool draws_set = false;
    bool seed_set = false;
};

struct Loaded {
    std::string path;
    Document doc;
    Problem problem;
};

Loaded load(const std::string& path, const Overrides& ov) {
    Document doc = read_document(path);
    if (!ov.backend.empty()) doc.engine.backend = backend_from_string(ov.backend);
    if (!std::isnan(ov.theta)) doc.economy.theta = Vector::Constant(doc.economy.gamma.size(), ov.theta);
    if (ov.draws_set) doc.engine.num_draws = ov.draws;
    if (ov.seed_set) doc.engine.seed = ov.seed;
    Problem problem = validate_document(doc);
    for (const std::string& w : problem.warnings) std::cerr << "warning: " << w << "\n";
    return {path, std::move(doc), std::move(problem)};
}

const ShockModel& require_shock(const Loaded& in) {
    if (!in.problem.shock) throw Error(ErrorCode::InvalidModel, in.path + ": the document has no shock");
    return *in.problem.shock;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

Header header_for(const std::string& command, const Loaded* in, const EngineConfig& engine) {
    Header h{{"command", command}, {"generated", timestamp()}};
    if (in) {
        h.emplace_back("input", in->path);
        h.emplace_back("label", in->problem.econ.label());
        h.emplace_back("theta", to_json(in->problem.econ.theta()).dump());
        h.emplace_back("shock", in->problem.shock ? in->problem.shock->kind_name() : "none");
        h.emplace_back("signal", in->problem.signal.kind_name());
    }
    h.emplace_back("backend", to_string(engine.backend));
    h.emplace_back("num_draws", std::to_string(engine.num_draws));
    h.emplace_back("seed", std::to_string(engine.seed));
    return h;
}

Json header_json(const Header& h) {
    Json j = Json::object();
    for (const auto& [k, v] : h) j[k] = v;
    return j;
}

void write_json(const fs::path& path, const Header& h, Json body) {
    body["provenance"] = header_json(h);
    write_text(path, body.dump(2) + "\n");
}

fs::path prepare(const std::string& dir) {
    fs::path out(dir);
    fs::create_directories(out);
    return out;
}

std::string idx(int k) { return std::to_string(k + 1); }

void write_equilibrium_csv(const fs::path& path, const Header& h, const Solution& s) {
    CsvWriter csv(path, h,
                  {"sector", "v0", "zeta", "r", "xi", "v_zeta", "y0", "c0", "l", "p_over_w", "p_rel",
                   "expected_exp_rho"});
    for (int k = 0; k < s.econ.n(); ++k) {
        csv.row({idx(k), fmt(s.leo.v0(k)), fmt(s.profile.zeta(k)), fmt(s.profile.r(k)), fmt(s.profile.xi(k)),
                 fmt(s.profile.v_zeta(k)), fmt(s.equil.y0(k)), fmt(s.equil.c0(k)), fmt(s.equil.l(k)),
                 fmt(s.equil.p_over_w(k)), fmt(s.equil.p_rel(k)), fmt(s.equil.expected_exp_rho(k))});
    }
}

void print_solution(const Solution& s, std::ostream& os) {
    os << "psi = " << fmt(s.profile.psi) << ", wage identity = " << fmt(s.equil.wage_identity) << "\n";
    os << "sector  zeta        xi          y0          c0          p/w\n";
    for (int k = 0; k < s.econ.n(); ++k) {
        char line[128];
        std::snprintf(line, sizeof line, "%-7d %-11.6f %-11.6f %-11.6f %-11.6f %-11.6f\n", k + 1, s.profile.zeta(k),
                      s.profile.xi(k), s.equil.y0(k), s.equil.c0(k), s.equil.p_over_w(k));
        os << line;
    }
}

int cmd_validate(const std::string& file, const Overrides& ov) {
    const Loaded in = load(file, ov);
    std::cout << canonical_text(in.doc);
    return 0;
}

int cmd_equilibrium(const std::string& file, const std::string& out_dir, const Overrides& ov) {
    const Loaded in = load(file, ov);
    const ShockModel& model = require_shock(in);
    const fs::path out = prepare(out_dir);
    const SignalModel& signal = in.problem.signal;
    const EngineConfig& engine = in.problem.engine;
    const Header h = header_for("equilibrium", &in, engine);

    if (signal.is_full())
        throw Error(ErrorCode::InvalidModel,
                    "under the full signal the equilibrium depends on the draw; use 'simulate' instead");
    if (signal.is_none()) {
        const Solution s = solve(in.problem.econ, engine, model, signal, SignalRealization::unconditional());
        write_equilibrium_csv(out / "equilibrium.csv", h, s);
        write_json(out / "equilibrium.json", h, to_json(s));
        print_solution(s, std::cout);
        return 0;
    }
    Json cells = Json::array();
    for (std::size_t c = 0; c < signal.num_cells(); ++c) {
        const Solution s = solve(in.problem.econ, engine, model, signal, SignalRealization::in_cell(c));
        Header hc = h;
        hc.emplace_back("cell", std::to_string(c + 1));
        write_equilibrium_csv(out / ("equilibrium_cell" + std::to_string(c + 1) + ".csv"), hc, s);
        Json j = to_json(s);
        j["cell"] = c + 1;
        cells.push_back(j);
        std::cout << "cell " << c + 1 << "\n";
        print_solution(s, std::cout);
    }
    write_json(out / "equilibrium.json", h, Json{{"cells", cells}});
    return 0;
}

int cmd_simulate(const std::string& file, const std::string& out_dir, int bins, const Overrides& ov) {
    const Loaded in = load(file, ov);
    const ShockModel& model = require_shock(in);
    const fs::path out = prepare(out_dir);
    const EngineConfig& engine = in.problem.engine;
    Header h = header_for("simulate", &in, engine);
    h.emplace_back("bins", std::to_string(bins));
    h.emplace_back("threads", std::to_string(worker_count()));

    const SignalModel& signal = in.problem.signal;
    // The no-information equilibrium serves as the comparison point and as
    // the equilibrium itself when there is no signal.
    const Solution base =
        solve(in.problem.econ, engine, model, SignalModel::none(), SignalRealization::unconditional());
    const SimulationReport r =
        run_campaign(base, engine, model, signal, CampaignConfig{engine.num_draws, engine.seed, bins});

    const int n = in.problem.econ.n();
    CsvWriter summary(out / "summary.csv", h,
                      {"sector", "profit_mean", "profit_mean_se", "profit_sd", "profit_sd_se", "default_prob",
                       "default_prob_se", "tau_mean", "tau_mean_se", "eps_mean", "eps_mean_se"});
    for (int k = 0; k < n; ++k) {
        summary.row({idx(k), fmt(r.profit_mean(k)), fmt(r.profit_mean_se(k)), fmt(r.profit_sd(k)),
                     fmt(r.profit_sd_se(k)), fmt(r.default_prob(k)), fmt(r.default_prob_se(k)), fmt(r.tau_mean(k)),
                     fmt(r.tau_mean_se(k)), fmt(r.eps_mean(k)), fmt(r.eps_mean_se(k))});
    }
    CsvWriter cascades(out / "cascades.csv", h, {"default_set", "probability"});
    for (const auto& [mask, p] : r.cascade_prob) cascades.row({"\"" + cascade_label(mask, n) + "\"", fmt(p)});
    for (int k = 0; k < n; ++k) {
        const SectorHistograms& sh = r.histograms[static_cast<std::size_t>(k)];
        const auto write = [&](const char* name, const Histogram& hist) {
            Header hh = h;
            hh.emplace_back("sector", idx(k));
            hh.emplace_back("quantity", name);
            write_histogram(out / ("hist_" + std::string(name) + "_" + idx(k) + ".dat"), hist, hh);
        };
        write("tau", sh.tau);
        write("epsilon", sh.epsilon);
        write("profit", sh.profit);
    }
    write_json(out / "report.json", h, to_json(r));

    std::cout << "sector  default_prob  se        profit_sd\n";
    for (int k = 0; k < n; ++k) {
        char line[128];
        std::snprintf(line, sizeof line, "%-7d %-13.4f %-9.4f %-9.4f\n", k + 1, r.default_prob(k),
                      r.default_prob_se(k), r.profit_sd(k));
        std::cout << line;
    }
    if (r.welfare_bound_violations > 0) {
        std::cerr << "welfare bound violated on " << r.welfare_bound_violations << " draws\n";
        return 1;
    }
    return 0;
}

int cmd_defaults(const std::string& file, double eta_o, const std::string& out_dir, const Overrides& ov) {
    const Loaded in = load(file, ov);
    const ShockModel& model = require_shock(in);
    const auto o = model.single_sector();
    if (!o) throw Error(ErrorCode::UnsupportedShock, "classification needs a shock concentrated on one sector");
    const fs::path out = prepare(out_dir);
    const EngineConfig& engine = in.problem.engine;
    Header h = header_for("defaults", &in, engine);
    h.emplace_back("eta_o", fmt(eta_o));

    const Economy& econ = in.problem.econ;
    const Solution base = solve(econ, engine, model, SignalModel::none(), SignalRealization::unconditional());
    const ConditionalLaw law = condition(engine, model, SignalModel::none(), SignalRealization::unconditional());
    const DefaultClassification c = classify_defaults_single_shock(econ, base.leo, model, law, eta_o);

    Vector eta = Vector::Zero(econ.n());
    eta(*o) = eta_o;
    const Realization real = realize(econ, base.leo, base.profile, base.equil, eta);

    CsvWriter csv(out / "defaults.csv", h, {"sector", "verdict", "L_minus", "tau", "epsilon", "exact_default"});
    int contradictions = 0;
    for (int k = 0; k < econ.n(); ++k) {
        const Verdict v = c.verdicts[static_cast<std::size_t>(k)];
        const bool d = in_default(real, k);
        if ((v == Verdict::Default && !d) || ((v == Verdict::NoDefault || v == Verdict::Never) && d)) ++contradictions;
        csv.row({idx(k), to_string(v), fmt(c.L_minus(k)), fmt(real.tau(k)), fmt(real.epsilon(k)), d ? "1" : "0"});
        std::cout << "sector " << k + 1 << ": " << to_string(v) << (d ? " (defaults)" : "") << "\n";
    }
    Json report = to_json(c);
    report["contradictions"] = contradictions;
    write_json(out / "thresholds.json", h, report);
    if (contradictions > 0) {
        std::cerr << contradictions << " verdicts contradict the exact default predicate\n";
        return 1;
    }
    return 0;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--theta-grid", "expected a:b:step, got '" + spec + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw CLI::ValidationError("--theta-grid", "expected a:b:step with a <= b and step > 0");
    std::vector<double> grid;
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return grid;
}

int cmd_sweep(const std::string& file, int sector, const std::string& grid_spec, const std::string& out_dir,
              const Overrides& ov) {
    const std::vector<double> grid = parse_grid(grid_spec);
    const Loaded in = load(file, ov);
    const ShockModel& model = require_shock(in);
    const Economy& econ = in.problem.econ;
    if (sector < 1 || sector > econ.n())
        throw CLI::ValidationError("--sector", "must lie in 1.." + std::to_string(econ.n()));
    if (!in.problem.signal.is_none())
        throw Error(ErrorCode::InvalidModel, "the leverage sweep is defined under no information");
    const fs::path out = prepare(out_dir);
    const EngineConfig& engine = in.problem.engine;
    Header h = header_for("sweep", &in, engine);
    h.emplace_back("sector", std::to_string(sector));
    h.emplace_back("theta_grid", grid_spec);

    const Solution base = solve(econ, engine, model, in.problem.signal, SignalRealization::unconditional());
    const ComparativeStatics cs = leverage_comparative_statics(base, sector - 1, grid);

    CsvWriter csv(out / "sweep.csv", h, {"theta", "sector", "zeta", "xi", "l", "c0", "p_over_w", "p_rel"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Solution& s = cs.solutions[i];
        for (int k = 0; k < econ.n(); ++k)
            csv.row({fmt(grid[i]), idx(k), fmt(s.profile.zeta(k)), fmt(s.profile.xi(k)), fmt(s.equil.l(k)),
                     fmt(s.equil.c0(k)), fmt(s.equil.p_over_w(k)), fmt(s.equil.p_rel(k))});
    }
    write_json(out / "sweep.json", h,
               Json{{"xi_ok", cs.xi_ok},
                    {"labor_ok", cs.labor_ok},
                    {"consumption_ok", cs.consumption_ok},
                    {"prices_ok", cs.prices_ok},
                    {"failures", cs.failures}});
    std::cout << "xi " << (cs.xi_ok ? "ok" : "FAIL") << ", labor " << (cs.labor_ok ? "ok" : "FAIL")
              << ", consumption " << (cs.consumption_ok ? "ok" : "FAIL") << ", prices "
              << (cs.prices_ok ? "ok" : "FAIL") << "\n";
    for (const std::string& f : cs.failures) std::cerr << "  " << f << "\n";
    return cs.all_ok() ? 0 : 1;
}

int cmd_reproduce(const std::string& table, const std::string& out_dir, const Overrides& ov) {
    ReproduceOptions opt;
    if (ov.draws_set) opt.num_draws = ov.draws;
    if (ov.seed_set) opt.seed = ov.seed;
    if (!ov.backend.empty()) opt.backend = backend_from_string(ov.backend);
    std::vector<std::string> ids;
    if (table == "all") {
        ids = table_ids();
    } else {
        ids.push_back(table);
    }
    for (const std::string& id : ids)
        if (std::find(table_ids().begin(), table_ids().end(), id) == table_ids().end())
            throw Error(ErrorCode::UnknownTable, "unknown table '" + id + "'");

    const fs::path out = prepare(out_dir);
    Reproducer rep(opt);
    bool all_pass = true;
    for (const std::string& id : ids) {
        const TableResult t = rep.reproduce(id);
        const Header h{{"command", "reproduce"},   {"generated", timestamp()},
                       {"table", id},              {"backend", to_string(opt.backend)},
                       {"num_draws", std::to_string(opt.num_draws)}, {"seed", std::to_string(opt.seed)}};
        CsvWriter csv(out / ("table_" + id + ".csv"), h,
                      {"provenance", "theta", "sector", "statistic", "value", "std_error", "reference", "tolerance",
                       "pass"});
        int failed = 0;
        for (const TableCell& c : t.cells) {
            csv.row({"\"" + c.provenance + "\"", fmt(c.theta), std::to_string(c.sector), c.statistic, fmt(c.value),
                     fmt(c.std_error), fmt(c.reference), fmt(c.tolerance), c.pass() ? "1" : "0"});
            if (!c.pass()) {
                ++failed;
                std::cerr << "  mismatch " << c.provenance << ": got " << fmt(c.value) << ", expected "
                          << fmt(c.reference) << " +- " << fmt(c.tolerance) << "\n";
            }
        }
        write_json(out / ("table_" + id + "_diff.json"), h, to_json(t));
        std::cout << "table " << id << " (" << t.title << "): " << (t.passed() ? "PASS" : "FAIL") << ", "
                  << t.cells.size() - static_cast<std::size_t>(failed) << "/" << t.cells.size() << " cells\n";
        all_pass = all_pass && t.passed();
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid Walrasian equilibria of levered production networks"};
    app.require_subcommand(1);

    Overrides ov;
    std::string out_dir = "out";
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--backend", ov.backend, "exact | analytic | mc (overrides the document)");
        sub->add_option("--theta", ov.theta, "uniform leverage (overrides the document)");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    };
    const auto add_draws = [&](CLI::App* sub) {
        sub->add_option_function<std::uint64_t>("--draws", [&](std::uint64_t v) { ov.draws = v, ov.draws_set = true; },
                                                "Monte Carlo draws");
        sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { ov.seed = v, ov.seed_set = true; },
                                                "random seed");
    };

    std::string file;
    auto* validate = app.add_subcommand("validate", "check a document and print its canonical form");
    validate->add_option("file", file)->required();
    validate->add_option("--backend", ov.backend);
    validate->add_option("--theta", ov.theta);

    auto* equilibrium = app.add_subcommand("equilibrium", "solve the maximal equilibrium");
    equilibrium->add_option("file", file)->required();
    add_common(equilibrium);
    add_draws(equilibrium);

    int bins = 64;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo campaign");
    simulate->add_option("file", file)->required();
    simulate->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
    add_common(simulate);
    add_draws(simulate);

    double eta_o = 0.0;
    auto* defaults = app.add_subcommand("defaults", "classify defaults after a single-sector shock");
    defaults->add_option("file", file)->required();
    defaults->add_option("--eta-o", eta_o, "realized shock at the shocked sector")->required();
    add_common(defaults);
    add_draws(defaults);

    int sector = 0;
    std::string grid;
    auto* sweep = app.add_subcommand("sweep", "leverage comparative statics at one sector");
    sweep->add_option("file", file)->required();
    sweep->add_option("--sector", sector, "1-based sector")->required();
    sweep->add_option("--theta-grid", grid, "a:b:step")->required();
    add_common(sweep);
    add_draws(sweep);

    std::string table;
    auto* reproduce_cmd = app.add_subcommand("reproduce", "recompute a reference table and compare");
    reproduce_cmd->add_option("--table", table, "1..8, cycle-minus-line or all")->required();
    reproduce_cmd->add_option("--backend", ov.backend);
    reproduce_cmd->add_option("--out", out_dir)->capture_default_str();
    add_draws(reproduce_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) return cmd_validate(file, ov);
        if (*equilibrium) return cmd_equilibrium(file, out_dir, ov);
        if (*simulate) return cmd_simulate(file, out_dir, bins, ov);
        if (*defaults) return cmd_defaults(file, eta_o, out_dir, ov);
        if (*sweep) return cmd_sweep(file, sector, grid, out_dir, ov);
        if (*reproduce_cmd) return cmd_reproduce(table, out_dir, ov);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == ErrorCode::FileNotFound ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
