#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "rigidnet/debt.hpp"
#include "rigidnet/economy.hpp"
#include "rigidnet/shocks.hpp"

namespace rigidnet {

// Maximal (time-0) equilibrium with the wage as numeraire, w = 1.
struct Equilibrium {
    Vector y0;
    Matrix z0;  // z0(j, k): good j ordered by sector k
    Vector l;
    Vector c0;
    Vector p_over_w;
    Vector p_rel;  // p_k / prod_j p_j^gamma_j
    Vector r;
    double wage = 1.0;
    Vector expected_exp_rho;  // E[exp(rho_k) | signal]
    // prod (p/w)^gamma prod E[exp(rho)]^gamma exp(-sum v0 zeta); equals
    // the wage over itself, i.e. one, in any equilibrium.
    double wage_identity = 1.0;
};

Equilibrium maximal_equilibrium(const Economy& econ, const LeontiefData& leo, const DebtProfile& profile,
                                const Vector& expected_exp_rho);

// Shock-contingent outcomes at a realization eta.
struct Realization {
    Vector eta;
    Vector rho;
    Vector tau;
    Vector epsilon;
    Vector y_eta;
    Matrix z_eta;
    Vector c_eta;
    Vector profit;
    Vector assets;
    Vector liabilities;
    Vector default_cost;
    Vector recovery;
    Vector bank_profit;
    double budget = 0.0;
    double welfare = 0.0;
    Vector domar;
    bool domar_defined = true;
};

Realization realize(const Economy& econ, const LeontiefData& leo, const DebtProfile& profile,
                    const Equilibrium& equil, const Vector& eta);

// Sector k defaults when tau_k < eps_k. Ties are not defaults, and a gap
// within rounding of eps_k counts as a tie.
inline constexpr double kDefaultTieTolerance = 1e-12;

inline bool default_predicate(double tau, double eps) { return tau < eps - kDefaultTieTolerance * std::abs(eps); }

inline bool in_default(const Realization& r, int k) { return default_predicate(r.tau(k), r.epsilon(k)); }

struct HultenRow {
    double v0 = 0.0;     // marginal welfare effect of eta_k
    double domar = 0.0;  // lambda_k
    double gap = 0.0;    // v0 - lambda
    bool violated = false;  // tau_k / sum_j tau_j gamma_j < v0_k / (psi v_zeta_k)
};

std::vector<HultenRow> hulten_diagnostics(const Realization& real, const DebtProfile& profile, const Vector& v0);

struct WelfareBound {
    double lhs = 0.0;    // U(c^eta)
    double rhs = 0.0;    // exp(sum v0 eta)
    double slack = 0.0;  // log psi + sum v0 zeta
};

WelfareBound welfare_bound_check(const Realization& real, const Vector& v0, const Vector& zeta, double psi);

// Everything the downstream modules need for one economy under one signal
// realization.
struct Solution {
    Economy econ;
    LeontiefData leo;
    std::shared_ptr<const NormalizedShocks> shocks;
    DebtProfile profile;
    Equilibrium equil;
};

Solution solve(const Economy& econ, const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
               const SignalRealization& realization = SignalRealization::unconditional());

// Same shocks, different leverage (common random numbers across theta).
Solution resolve_with_theta(const Solution& base, const Vector& theta);

struct ComparativeStatics {
    std::vector<double> theta_grid;
    std::vector<Solution> solutions;
    bool xi_ok = true;     // (i)
    bool labor_ok = true;  // (ii)
    bool consumption_ok = true;  // (iii)
    bool prices_ok = true;  // (iv)
    std::vector<std::string> failures;
    bool all_ok() const { return xi_ok && labor_ok && consumption_ok && prices_ok; }
};

ComparativeStatics leverage_comparative_statics(const Solution& base, int o, const std::vector<double>& theta_grid,
                                                double tolerance = 1e-10);

}  // namespace rigidnet
