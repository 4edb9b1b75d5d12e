#include "rigidnet/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "rigidnet/errors.hpp"

namespace rigidnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EconomySpec chain_spec(int n, double alpha, const std::optional<Vector>& gamma, const std::optional<Vector>& theta,
                       const std::string& label) {
    if (n < 2) throw Error(ErrorCode::DimensionMismatch, "at least two sectors are required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
    EconomySpec spec;
    spec.label = label;
    spec.A = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) spec.A(k - 1, k) = alpha;
    spec.gamma = gamma ? *gamma : Vector::Constant(n, 1.0 / n);
    spec.theta = theta ? *theta : Vector::Zero(n);
    return spec;
}

// Published values, one row per (theta, sector).
struct Row {
    double theta;
    int sector;
    std::vector<double> values;
};

const std::vector<Row> kLineQuantities = {
    {0.5, 1, {0.54, 0.54, 0.33, 1}},     {0.5, 2, {0.36, 0.14, 0.19, 8.62}},
    {0.5, 3, {0.34, 0.19, 0.22, 5.16}},  {0.5, 4, {0.24, 0.12, 0.24, 3.33}},
    {1.0, 1, {0.55, 0.55, 0.36, 1}},     {1.0, 2, {0.31, 0.12, 0.17, 10.73}},
    {1.0, 3, {0.31, 0.2, 0.2, 6.14}},    {1.0, 4, {0.23, 0.13, 0.23, 3.78}},
};
const std::vector<Row> kLineFinancial = {
    {0.5, 1, {0, 0, 0.54, 0.54}},        {0.5, 2, {0.55, 0.55, 0.49, 0.61}},
    {0.5, 3, {0.09, 0.42, 0.4, 0.52}},   {0.5, 4, {0.06, 0.31, 0.25, 0.33}},
    {1.0, 1, {0, 0, 0.54, 0.55}},        {1.0, 2, {0.77, 0.77, 0.49, 0.66}},
    {1.0, 3, {0.13, 0.59, 0.4, 0.56}},   {1.0, 4, {0.08, 0.44, 0.25, 0.36}},
};
const std::vector<Row> kLineProfitSd = {
    {0.5, 1, {0}}, {0.5, 2, {0.82}}, {0.5, 3, {0.14}}, {0.5, 4, {0.06}},
    {1.0, 1, {0}}, {1.0, 2, {0.88}}, {1.0, 3, {0.15}}, {1.0, 4, {0.07}},
};
const std::vector<Row> kLineDefaults = {
    {1.0, 1, {0}}, {1.0, 2, {0.6685}}, {1.0, 3, {0.4641}}, {1.0, 4, {0.3742}},
};
const std::vector<Row> kCycleQuantities = {
    {0.5, 1, {0.51, 0.25, 0.28, 2.54}},  {0.5, 2, {0.43, 0.2, 0.2, 9.87}},
    {0.5, 3, {0.49, 0.28, 0.23, 5.82}},  {0.5, 4, {0.52, 0.27, 0.25, 3.7}},
    {1.0, 1, {0.48, 0.25, 0.28, 2.78}},  {1.0, 2, {0.37, 0.18, 0.18, 12.21}},
    {1.0, 3, {0.44, 0.28, 0.21, 6.96}},  {1.0, 4, {0.49, 0.28, 0.25, 4.23}},
};
const std::vector<Row> kCycleFinancial = {
    {0.5, 1, {0.04, 0.24, 0.625, 0.66}}, {0.5, 2, {0.42, 0.57, 0.625, 0.77}},
    {0.5, 3, {0.1, 0.44, 0.625, 0.76}},  {0.5, 4, {0.07, 0.33, 0.625, 0.73}},
    {1.0, 1, {0.06, 0.34, 0.625, 0.67}}, {1.0, 2, {0.58, 0.78, 0.625, 0.82}},
    {1.0, 3, {0.15, 0.62, 0.625, 0.82}}, {1.0, 4, {0.1, 0.47, 0.625, 0.78}},
};
const std::vector<Row> kCycleProfitSd = {
    {0.5, 1, {0.09}}, {0.5, 2, {0.89}}, {0.5, 3, {0.23}}, {0.5, 4, {0.15}},
    {1.0, 1, {0.09}}, {1.0, 2, {0.95}}, {1.0, 3, {0.25}}, {1.0, 4, {0.16}},
};
// Printed in percent.
const std::vector<Row> kCycleDefaults = {
    {1.0, 1, {0.3179}}, {1.0, 2, {0.7241}}, {1.0, 3, {0.4901}}, {1.0, 4, {0.3974}},
};
const std::vector<Row> kCycleMinusLine = {
    {1.0, 1, {0.06, 0.34, -0.07, -0.08, 0.3179}},
    {1.0, 2, {-0.19, 0.01, 0.06, 0.01, 0.0556}},
    {1.0, 3, {0.02, 0.03, 0.13, 0.01, 0.026}},
    {1.0, 4, {0.02, 0.03, 0.26, 0.02, 0.0233}},
};

std::string fmt_theta(double theta) {
    std::ostringstream os;
    os << theta;
    return os.str();
}

TableCell make_cell(const std::string& id, const Row& row, const std::string& stat, double value, double reference,
                    bool stochastic, double se, double tolerance, bool theta_is_key = true) {
    TableCell c;
    c.theta = theta_is_key ? row.theta : kNaN;
    c.sector = row.sector;
    c.statistic = stat;
    c.value = value;
    c.std_error = se;
    c.reference = reference;
    c.stochastic = stochastic;
    c.tolerance = tolerance;
    c.provenance = "table " + id + " / " + (theta_is_key ? "theta=" + fmt_theta(row.theta) + " / " : "") +
                   "k=" + std::to_string(row.sector) + " / " + stat;
    return c;
}

}  // namespace

Economy make_line(int n, double alpha, const std::optional<Vector>& gamma, const std::optional<Vector>& theta) {
    return Economy::validate(chain_spec(n, alpha, gamma, theta, "line"));
}

Economy make_cycle(int n, double alpha, const std::optional<Vector>& gamma, const std::optional<Vector>& theta) {
    EconomySpec spec = chain_spec(n, alpha, gamma, theta, "cycle");
    spec.A(n - 1, 0) = alpha;
    return Economy::validate(spec);
}

std::string to_string(Topology t) { return t == Topology::Line ? "line" : "cycle"; }

Economy reference_economy(Topology topology, double theta, const ReferenceSetup& setup) {
    const Vector th = Vector::Constant(setup.n, theta);
    return topology == Topology::Line ? make_line(setup.n, setup.alpha, std::nullopt, th)
                                      : make_cycle(setup.n, setup.alpha, std::nullopt, th);
}

ShockModel reference_shock(const ReferenceSetup& setup) {
    return ShockModel::validate(SingleNodeExponential{setup.shocked, setup.lambda}, setup.n);
}

double cell_tolerance(bool stochastic, double std_error, double floor) {
    return stochastic ? std::max(floor, 4.0 * std_error) : floor;
}

bool TableCell::pass() const { return std::abs(value - reference) <= tolerance; }

bool TableResult::passed() const {
    for (const TableCell& c : cells)
        if (!c.pass()) return false;
    return true;
}

const std::vector<std::string>& table_ids() {
    static const std::vector<std::string> ids{"1", "2", "3", "4", "5", "6", "7", "8", "cycle-minus-line"};
    return ids;
}

Reproducer::Reproducer(ReproduceOptions options, ReferenceSetup setup)
    : options_(options), setup_(setup), shock_(reference_shock(setup)) {}

const Solution& Reproducer::solution(Topology topology, double theta) {
    const auto key = std::make_pair(topology, theta);
    auto it = solutions_.find(key);
    if (it == solutions_.end()) {
        const EngineConfig engine{options_.backend, options_.num_draws, options_.seed};
        it = solutions_
                 .emplace(key, solve(reference_economy(topology, theta, setup_), engine, shock_, SignalModel::none()))
                 .first;
    }
    return it->second;
}

const SimulationReport& Reproducer::campaign(Topology topology, double theta) {
    const auto key = std::make_pair(topology, theta);
    auto it = campaigns_.find(key);
    if (it == campaigns_.end()) {
        const EngineConfig engine{options_.backend, options_.num_draws, options_.seed};
        const CampaignConfig config{options_.num_draws, options_.seed, 64};
        it = campaigns_
                 .emplace(key, run_campaign(solution(topology, theta), engine, shock_, SignalModel::none(), config))
                 .first;
    }
    return it->second;
}

TableResult Reproducer::reproduce(const std::string& id) {
    if (id == "1") return quantities(id, Topology::Line);
    if (id == "2") return financial(id, Topology::Line);
    if (id == "3") return profit_sd(id, Topology::Line);
    if (id == "4") return default_probs(id, Topology::Line);
    if (id == "5") return quantities(id, Topology::Cycle);
    if (id == "6") return financial(id, Topology::Cycle);
    if (id == "7") return profit_sd(id, Topology::Cycle);
    if (id == "8") return default_probs(id, Topology::Cycle);
    if (id == "cycle-minus-line") return cycle_minus_line();
    throw Error(ErrorCode::UnknownTable, "unknown table '" + id + "'");
}

TableResult Reproducer::quantities(const std::string& id, Topology topology) {
    TableResult t{id, "Equilibrium quantities, " + to_string(topology), {}};
    const auto& rows = topology == Topology::Line ? kLineQuantities : kCycleQuantities;
    const char* stats[] = {"y", "l", "c", "p/w"};
    for (const Row& row : rows) {
        const Equilibrium& eq = solution(topology, row.theta).equil;
        const int k = row.sector - 1;
        const double v[] = {eq.y0(k), eq.l(k), eq.c0(k), eq.p_over_w(k)};
        for (int s = 0; s < 4; ++s) t.cells.push_back(
                make_cell(id, row, stats[s], v[s], row.values[s], false, 0.0, kDeterministicTolerance));
    }
    return t;
}

TableResult Reproducer::financial(const std::string& id, Topology topology) {
    TableResult t{id, "Financial variables, " + to_string(topology), {}};
    const auto& rows = topology == Topology::Line ? kLineFinancial : kCycleFinancial;
    const char* stats[] = {"zeta", "xi", "v0", "v_zeta"};
    for (const Row& row : rows) {
        const Solution& s = solution(topology, row.theta);
        const int k = row.sector - 1;
        const double v[] = {s.profile.zeta(k), s.profile.xi(k), s.leo.v0(k), s.profile.v_zeta(k)};
        for (int i = 0; i < 4; ++i) t.cells.push_back(
                make_cell(id, row, stats[i], v[i], row.values[i], false, 0.0, kDeterministicTolerance));
    }
    return t;
}

TableResult Reproducer::profit_sd(const std::string& id, Topology topology) {
    TableResult t{id, "Profit standard deviation, " + to_string(topology), {}};
    const auto& rows = topology == Topology::Line ? kLineProfitSd : kCycleProfitSd;
    for (const Row& row : rows) {
        const SimulationReport& r = campaign(topology, row.theta);
        const int k = row.sector - 1;
        t.cells.push_back(make_cell(id, row, "profit_sd", r.profit_sd(k), row.values[0], true, r.profit_sd_se(k),
                                    kProfitSdTolerance));
    }
    return t;
}

TableResult Reproducer::default_probs(const std::string& id, Topology topology) {
    TableResult t{id, "Default probabilities, " + to_string(topology), {}};
    const auto& rows = topology == Topology::Line ? kLineDefaults : kCycleDefaults;
    for (const Row& row : rows) {
        const SimulationReport& r = campaign(topology, row.theta);
        const int k = row.sector - 1;
        t.cells.push_back(
            make_cell(id, row, "default_prob", r.default_prob(k), row.values[0], true, r.default_prob_se(k),
                      cell_tolerance(true, r.default_prob_se(k), kDefaultProbFloor), false));
    }
    return t;
}

TableResult Reproducer::cycle_minus_line() {
    const std::string id = "cycle-minus-line";
    TableResult t{id, "Cycle minus line at theta = 1", {}};
    const SimulationReport& cyc = campaign(Topology::Cycle, 1.0);
    const SimulationReport& lin = campaign(Topology::Line, 1.0);
    const DeltaTable d = compare_leverage(cyc, lin);
    const char* stats[] = {"d_zeta", "d_xi", "d_y", "d_c", "d_default_prob"};
    for (const Row& row : kCycleMinusLine) {
        const int k = row.sector - 1;
        const double v[] = {d.zeta(k), d.xi(k), d.y(k), d.c(k), d.default_prob(k)};
        for (int i = 0; i < 4; ++i) t.cells.push_back(
                make_cell(id, row, stats[i], v[i], row.values[i], false, 0.0, kDeterministicTolerance));
        const double se = std::hypot(cyc.default_prob_se(k), lin.default_prob_se(k));
        t.cells.push_back(make_cell(id, row, stats[4], v[4], row.values[4], true, se, kDeterministicTolerance));
    }
    return t;
}

TableResult reproduce(const std::string& table_id, const ReproduceOptions& options) {
    Reproducer r(options);
    return r.reproduce(table_id);
}

}  // namespace rigidnet
