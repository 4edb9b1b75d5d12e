#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rigidnet/economy.hpp"
#include "rigidnet/equilibrium.hpp"
#include "rigidnet/montecarlo.hpp"
#include "rigidnet/shocks.hpp"

namespace rigidnet {

// Chain 1 -> 2 -> ... -> n with A(k-1, k) = alpha; uniform gamma unless
// given; zero leverage unless given.
Economy make_line(int n, double alpha, const std::optional<Vector>& gamma = std::nullopt,
                  const std::optional<Vector>& theta = std::nullopt);
// The chain closed by A(n, 1) = alpha.
Economy make_cycle(int n, double alpha, const std::optional<Vector>& gamma = std::nullopt,
                   const std::optional<Vector>& theta = std::nullopt);

enum class Topology { Line, Cycle };

std::string to_string(Topology t);

// Reference experiment: four sectors, alpha = 0.6, exponential shock with
// rate 0.25 at sector 2, no information, uniform leverage.
struct ReferenceSetup {
    int n = 4;
    double alpha = 0.6;
    double lambda = 0.25;
    int shocked = 1;  // zero-based
};

Economy reference_economy(Topology topology, double theta, const ReferenceSetup& setup = {});
ShockModel reference_shock(const ReferenceSetup& setup = {});

struct ReproduceOptions {
    std::uint64_t num_draws = 1'000'000;
    std::uint64_t seed = 42;
    Backend backend = Backend::AnalyticExponential;  // for the cost of debt
};

struct TableCell {
    std::string provenance;  // "table 2 / theta=0.5 / k=2 / zeta"
    double theta = 0.0;      // NaN where leverage is not a row key
    int sector = 0;          // 1-based
    std::string statistic;
    double value = 0.0;
    double std_error = 0.0;  // zero for deterministic cells
    double reference = 0.0;
    double tolerance = 0.0;
    bool stochastic = false;
    bool pass() const;
};

struct TableResult {
    std::string id;
    std::string title;
    std::vector<TableCell> cells;
    bool passed() const;
};

// Equilibrium and financial cells and the cycle-minus-line deltas: +-0.01.
// Profit SDs: +-0.02. Default probabilities: +-max(0.005, 4 binomial SE).
inline constexpr double kDeterministicTolerance = 0.01;
inline constexpr double kProfitSdTolerance = 0.02;
inline constexpr double kDefaultProbFloor = 0.005;

// max(floor, 4 SE) for Monte Carlo cells, floor otherwise
double cell_tolerance(bool stochastic, double std_error, double floor = kDeterministicTolerance);

const std::vector<std::string>& table_ids();

// Computes reference tables, caching solutions and campaigns so that
// tables sharing a run do not repeat it.
class Reproducer {
public:
    explicit Reproducer(ReproduceOptions options = {}, ReferenceSetup setup = {});

    TableResult reproduce(const std::string& table_id);

    const Solution& solution(Topology topology, double theta);
    const SimulationReport& campaign(Topology topology, double theta);
    const ReproduceOptions& options() const { return options_; }
    const ReferenceSetup& setup() const { return setup_; }

private:
    TableResult quantities(const std::string& id, Topology topology);
    TableResult financial(const std::string& id, Topology topology);
    TableResult profit_sd(const std::string& id, Topology topology);
    TableResult default_probs(const std::string& id, Topology topology);
    TableResult cycle_minus_line();

    ReproduceOptions options_;
    ReferenceSetup setup_;
    ShockModel shock_;
    std::map<std::pair<Topology, double>, Solution> solutions_;
    std::map<std::pair<Topology, double>, SimulationReport> campaigns_;
};

// Convenience wrapper; throws UnknownTable for ids outside table_ids().
TableResult reproduce(const std::string& table_id, const ReproduceOptions& options = {});

}  // namespace rigidnet
