#include "rigidnet/debt.hpp"

#include <cmath>

#include "rigidnet/errors.hpp"

namespace rigidnet {

namespace {

double inf_norm(const Matrix& M) { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

ZetaSolution solve_zeta(const NormalizedShocks& shocks, int k, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw Error(ErrorCode::LeverageOutOfRange, "leverage must lie in [0, 1]");
    ZetaSolution sol;
    if (theta == 0.0) return sol;

    const auto f = [&](double x) { return shocks.expect_clamp(k, x, theta) - 1.0; };
    double lo = 1.0;
    const double f_lo = f(lo);
    if (f_lo >= 0.0) {
        sol.residual = f_lo;
        return sol;
    }
    const double emin = shocks.expect_min(k);
    if (!(emin > 0.0)) throw Error(ErrorCode::BracketFailure, "E[min(eps, tau)] is not positive");
    double hi = (1.0 / emin) * (1.0 + 1e-9);
    if (f(hi) < 0.0)
        throw Error(ErrorCode::BracketFailure,
                    "cost-of-debt equation has no sign change for sector " + std::to_string(k + 1));

    int it = 0;
    while (hi - lo > kZetaTolerance && it < kZetaMaxIterations) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++it;
    }
    const double x = 0.5 * (lo + hi);
    sol.zeta = std::log(x);
    sol.residual = f(x);
    sol.iterations = it;
    return sol;
}

Vector solve_zeta_all(const Economy& econ, const NormalizedShocks& shocks) {
    Vector zeta(econ.n());
    for (int k = 0; k < econ.n(); ++k) zeta(k) = solve_zeta(shocks, k, econ.theta()(k)).zeta;
    return zeta;
}

Vector solve_zeta_all(const Economy& econ, const LeontiefData& leo, const EngineConfig& engine,
                      const ShockModel& model, const SignalModel& signal, const SignalRealization& realization) {
    const NormalizedShocks shocks(econ, leo, condition(engine, model, signal, realization));
    return solve_zeta_all(econ, shocks);
}

DebtProfile debt_profile(const Economy& econ, const LeontiefData& leo, const Vector& zeta) {
    const int n = econ.n();
    if (zeta.size() != n) throw Error(ErrorCode::DimensionMismatch, "zeta has the wrong length");
    for (int k = 0; k < n; ++k)
        if (!(zeta(k) >= 0.0) || !std::isfinite(zeta(k)))
            throw Error(ErrorCode::InconsistentProfile, "zeta must be finite and nonnegative");

    DebtProfile p;
    p.zeta = zeta;
    p.xi = leo.L * zeta;
    const Vector discount = (-zeta).array().exp().matrix();
    p.L_zeta = leontief_inverse(econ.A(), discount, reachability(econ.A()));
    const Vector labor = econ.beta().cwiseProduct(discount);
    p.psi = econ.gamma().dot(p.L_zeta * labor);
    if (!(p.psi > 0.0)) throw Error(ErrorCode::InconsistentProfile, "psi is not positive");
    p.v_zeta = p.L_zeta.transpose() * econ.gamma() / p.psi;
    p.r = Vector::Zero(n);
    for (int k = 0; k < n; ++k)
        if (econ.theta()(k) > 0.0) p.r(k) = std::expm1(zeta(k)) / econ.theta()(k);
    return p;
}

WalkExpansion walk_expansion_check(const Economy& econ, const Vector& zeta, int max_length) {
    const int n = econ.n();
    if (zeta.size() != n) throw Error(ErrorCode::DimensionMismatch, "zeta has the wrong length");
    WalkExpansion w;
    const Vector discount = (-zeta).array().exp().matrix();
    const Vector labor = econ.beta().cwiseProduct(discount);
    const Vector& gamma = econ.gamma();

    w.L_zeta_inverse = leontief_inverse(econ.A(), discount);
    w.psi_inverse = gamma.dot(w.L_zeta_inverse * labor);
    w.v_zeta_inverse = w.L_zeta_inverse.transpose() * gamma / w.psi_inverse;

    // One step along a walk: from j to a supplier k of j, weighted by
    // A_kj exp(-zeta_j).
    const Matrix M = discount.asDiagonal() * econ.A().transpose();
    Matrix power = Matrix::Identity(n, n);
    w.L_zeta_walks = Matrix::Identity(n, n);
    for (int h = 1; h <= max_length; ++h) {
        power = power * M;
        w.L_zeta_walks += power;
    }
    w.psi_walks = gamma.dot(w.L_zeta_walks * labor);
    w.v_zeta_walks = w.L_zeta_walks.transpose() * gamma / w.psi_walks;

    // ||M^h|| <= c q^floor(h/p) once ||M^p|| = q < 1.
    Matrix Mp = Matrix::Identity(n, n);
    double c = 1.0;
    int p = 0;
    double q = 1.0;
    for (int i = 1; i <= 256; ++i) {
        Mp = Mp * M;
        const double norm = inf_norm(Mp);
        if (norm < 1.0) {
            p = i;
            q = norm;
            break;
        }
        c = std::max(c, norm);
    }
    if (p == 0) {
        w.tail_bound = std::numeric_limits<double>::infinity();
        w.v_tail_bound = w.tail_bound;
        return w;
    }
    const int blocks = (max_length + 1) / p;
    w.tail_bound = c * p * std::pow(q, blocks) / (1.0 - q);
    w.v_tail_bound = w.tail_bound * (1.0 + w.v_zeta_walks.cwiseAbs().maxCoeff()) / w.psi_walks;
    return w;
}

}  // namespace rigidnet
