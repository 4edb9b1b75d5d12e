#pragma once

#include "rigidnet/economy.hpp"
#include "rigidnet/shocks.hpp"

namespace rigidnet {

// Cost-of-debt profile for a given primitive cost vector zeta.
struct DebtProfile {
    Vector zeta;    // 1 + r_k theta_k = exp(zeta_k)
    Vector xi;      // xi = L zeta
    Matrix L_zeta;  // (I - exp(-[zeta]) A')^{-1}
    double psi = 1.0;
    Vector v_zeta;  // L_zeta' gamma / psi
    Vector r;       // interest rates, 0 where theta_k = 0
};

struct ZetaSolution {
    double zeta = 0.0;
    double residual = 0.0;  // f(exp(zeta), theta)
    int iterations = 0;
};

inline constexpr int kZetaMaxIterations = 200;
inline constexpr double kZetaTolerance = 1e-12;

// Root of E[clamp(x tau_k, (1 - theta) eps_k, x eps_k) | signal] = 1 over
// x in [1, 1 / E[min(eps_k, tau_k)]], by bisection.
ZetaSolution solve_zeta(const NormalizedShocks& shocks, int k, double theta);

Vector solve_zeta_all(const Economy& econ, const NormalizedShocks& shocks);
Vector solve_zeta_all(const Economy& econ, const LeontiefData& leo, const EngineConfig& engine,
                      const ShockModel& model, const SignalModel& signal,
                      const SignalRealization& realization = SignalRealization::unconditional());

DebtProfile debt_profile(const Economy& econ, const LeontiefData& leo, const Vector& zeta);

// psi, L_zeta and v_zeta from the matrix inverse and from the truncated sum
// over supply walks of length <= max_length, with a bound on the neglected
// tail that does not use the inverse.
struct WalkExpansion {
    double psi_inverse = 0.0;
    double psi_walks = 0.0;
    Matrix L_zeta_inverse;
    Matrix L_zeta_walks;
    Vector v_zeta_inverse;
    Vector v_zeta_walks;
    double tail_bound = 0.0;    // on every entry of L_zeta and on psi
    double v_tail_bound = 0.0;  // on every entry of v_zeta
};

WalkExpansion walk_expansion_check(const Economy& econ, const Vector& zeta, int max_length);

}  // namespace rigidnet
