#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rigidnet/equilibrium.hpp"

namespace rigidnet {

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::uint64_t> counts;
};

struct SectorHistograms {
    Histogram tau;
    Histogram epsilon;
    Histogram profit;
};

struct CampaignConfig {
    std::uint64_t num_draws = 1'000'000;
    std::uint64_t seed = 42;
    int bins = 64;
};

inline constexpr int kBatchCount = 32;

struct SimulationReport {
    std::uint64_t num_draws = 0;
    std::uint64_t seed = 0;
    int bins = 0;

    Vector profit_mean, profit_mean_se;
    Vector profit_sd, profit_sd_se;
    Vector default_prob, default_prob_se;
    Vector tau_mean, tau_mean_se;
    Vector eps_mean, eps_mean_se;
    // Default sets keyed by bit mask (bit k set when sector k defaults).
    std::map<std::uint64_t, double> cascade_prob;
    std::vector<SectorHistograms> histograms;
    double welfare_mean = 0.0;
    double welfare_mean_se = 0.0;
    std::uint64_t welfare_bound_violations = 0;

    // Equilibrium objects of the no-information solution, for comparisons.
    Vector zeta, xi, y0, c0;
};

// "{2,3}" style label, 1-based.
std::string cascade_label(std::uint64_t mask, int n);

// Draws eta from the model and evaluates every draw at the equilibrium
// matching its signal realization: `base` under no information, one solve
// per cell under a partition, the full-information equilibrium draw by draw
// under the full signal.
SimulationReport run_campaign(const Solution& base, const EngineConfig& engine, const ShockModel& model,
                              const SignalModel& signal, const CampaignConfig& config);

struct DeltaTable {
    Vector zeta, xi, y, c, default_prob;
};

// a - b, sector by sector
DeltaTable compare_leverage(const SimulationReport& a, const SimulationReport& b);

}  // namespace rigidnet
