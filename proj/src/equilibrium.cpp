#include "rigidnet/equilibrium.hpp"

#include <cmath>

#include "rigidnet/errors.hpp"

namespace rigidnet {

Equilibrium maximal_equilibrium(const Economy& econ, const LeontiefData& leo, const DebtProfile& profile,
                                const Vector& expected_exp_rho) {
    const int n = econ.n();
    if (profile.zeta.size() != n || profile.v_zeta.size() != n || profile.xi.size() != n ||
        expected_exp_rho.size() != n)
        throw Error(ErrorCode::InconsistentProfile, "debt profile does not match the economy");
    for (int k = 0; k < n; ++k)
        if (!(expected_exp_rho(k) > 0.0) || !std::isfinite(expected_exp_rho(k)))
            throw Error(ErrorCode::InconsistentProfile, "E[exp(rho)] must be positive and finite");
    if (((leo.L * profile.zeta) - profile.xi).cwiseAbs().maxCoeff() > 1e-10)
        throw Error(ErrorCode::InconsistentProfile, "xi is not L zeta");

    const Vector& vz = profile.v_zeta;
    const Vector e_xi = profile.xi.array().exp().matrix();
    const Vector e_mxi = (-profile.xi).array().exp().matrix();
    const Vector e_mzeta = (-profile.zeta).array().exp().matrix();

    Equilibrium eq;
    eq.y0 = vz.cwiseProduct(e_mxi);
    eq.z0.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) eq.z0(j, k) = vz(k) * econ.A()(j, k) * e_mzeta(k) * e_mxi(j);
    eq.l = vz.cwiseProduct(econ.beta()).cwiseProduct(e_mzeta);
    eq.c0 = econ.gamma().cwiseProduct(e_mxi) / profile.psi;
    eq.p_over_w = e_xi.cwiseQuotient(expected_exp_rho);
    eq.r = profile.r;
    eq.expected_exp_rho = expected_exp_rho;

    const Vector& g = econ.gamma();
    const double log_bundle = g.dot(eq.p_over_w.array().log().matrix());
    eq.p_rel = (eq.p_over_w.array().log() - log_bundle).exp().matrix();
    eq.wage_identity =
        std::exp(log_bundle + g.dot(expected_exp_rho.array().log().matrix()) - leo.v0.dot(profile.zeta));
    return eq;
}

Realization realize(const Economy& econ, const LeontiefData& leo, const DebtProfile& profile,
                    const Equilibrium& equil, const Vector& eta) {
    const int n = econ.n();
    if (eta.size() != n) throw Error(ErrorCode::DimensionMismatch, "shock has the wrong length");
    Realization r;
    r.eta = eta;
    r.rho = leo.L * eta;
    const Vector e_rho = r.rho.array().exp().matrix();
    r.tau = e_rho.cwiseQuotient(equil.expected_exp_rho);
    r.epsilon = econ.A().transpose() * r.tau + econ.beta();

    r.y_eta = e_rho.cwiseProduct(equil.y0);
    r.z_eta = e_rho.asDiagonal() * equil.z0;
    r.c_eta = e_rho.cwiseProduct(equil.c0);

    const Vector& p = equil.p_over_w;  // w = 1
    const Vector e_zeta = profile.zeta.array().exp().matrix();
    r.assets = p.cwiseProduct(r.y_eta);
    r.liabilities = r.z_eta.transpose() * p + equil.wage * equil.l;
    r.profit = (r.tau - r.epsilon).cwiseProduct(profile.v_zeta) * equil.wage;

    r.default_cost.resize(n);
    r.recovery.resize(n);
    r.bank_profit.resize(n);
    for (int k = 0; k < n; ++k) {
        const double theta = econ.theta()(k);
        const double due = (theta + e_zeta(k) - 1.0) * r.liabilities(k);  // (1 + r_k) theta_k L_k
        const double available = std::max(0.0, r.assets(k) - (1.0 - theta) * r.liabilities(k));
        r.default_cost(k) = std::max(0.0, due - available);
        r.recovery(k) = due - r.default_cost(k);
        r.bank_profit(k) = (e_zeta(k) - 1.0) * r.liabilities(k) - r.default_cost(k);
    }

    const double gt = econ.gamma().dot(r.tau);
    r.budget = equil.wage / profile.psi * gt;
    r.welfare = std::exp(leo.v0.dot(eta) - leo.v0.dot(profile.zeta)) / profile.psi;
    r.domar_defined = gt > 0.0 && std::isfinite(gt);
    r.domar = r.domar_defined ? Vector(profile.psi * profile.v_zeta.cwiseProduct(r.tau) / gt)
                              : Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    return r;
}

std::vector<HultenRow> hulten_diagnostics(const Realization& real, const DebtProfile& profile, const Vector& v0) {
    const Eigen::Index n = v0.size();
    std::vector<HultenRow> rows(static_cast<std::size_t>(n));
    // sum_j tau_j gamma_j = psi * budget when w = 1
    const double gt = profile.psi * real.budget;
    for (Eigen::Index k = 0; k < n; ++k) {
        HultenRow& row = rows[static_cast<std::size_t>(k)];
        row.v0 = v0(k);
        row.domar = real.domar(k);
        row.gap = row.v0 - row.domar;
        row.violated = real.tau(k) / gt < v0(k) / (profile.psi * profile.v_zeta(k));
    }
    return rows;
}

WelfareBound welfare_bound_check(const Realization& real, const Vector& v0, const Vector& zeta, double psi) {
    WelfareBound b;
    b.lhs = real.welfare;
    b.rhs = std::exp(v0.dot(real.eta));
    b.slack = std::log(psi) + v0.dot(zeta);
    return b;
}

Solution solve(const Economy& econ, const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
               const SignalRealization& realization) {
    if (model.n() != econ.n()) throw Error(ErrorCode::DimensionMismatch, "shock and economy differ in dimension");
    LeontiefData leo = leontief(econ);
    auto shocks =
        std::make_shared<const NormalizedShocks>(econ, leo, condition(engine, model, signal, realization));
    const Vector zeta = solve_zeta_all(econ, *shocks);
    DebtProfile profile = debt_profile(econ, leo, zeta);
    Equilibrium equil = maximal_equilibrium(econ, leo, profile, shocks->expected_exp_rho());
    return Solution{econ, std::move(leo), std::move(shocks), std::move(profile), std::move(equil)};
}

Solution resolve_with_theta(const Solution& base, const Vector& theta) {
    Economy econ = base.econ.with_theta(theta);
    const Vector zeta = solve_zeta_all(econ, *base.shocks);
    DebtProfile profile = debt_profile(econ, base.leo, zeta);
    Equilibrium equil = maximal_equilibrium(econ, base.leo, profile, base.shocks->expected_exp_rho());
    return Solution{std::move(econ), base.leo, base.shocks, std::move(profile), std::move(equil)};
}

ComparativeStatics leverage_comparative_statics(const Solution& base, int o, const std::vector<double>& theta_grid,
                                                double tolerance) {
    const int n = base.econ.n();
    if (o < 0 || o >= n) throw Error(ErrorCode::DimensionMismatch, "sector out of range");
    ComparativeStatics cs;
    cs.theta_grid = theta_grid;
    for (double t : theta_grid) {
        Vector theta = base.econ.theta();
        theta(o) = t;
        cs.solutions.push_back(resolve_with_theta(base, theta));
    }

    const Matrix& L = base.leo.L;
    const SupplyRelations rel = suppliers_customers(base.econ, base.leo);
    const auto customer_of_o = [&](int k) { return k != o && L(k, o) > 0.0; };
    const auto supplier_of_o = [&](int k) { return k != o && rel.is_supplier(k, o); };
    const auto fail = [&](bool& flag, const std::string& msg) {
        flag = false;
        cs.failures.push_back(msg);
    };
    const auto name = [](int k) { return "sector " + std::to_string(k + 1); };

    bool some_labor_down = cs.solutions.size() < 2;
    std::vector<bool> labor_nonincreasing(static_cast<std::size_t>(n), true);
    for (std::size_t s = 1; s < cs.solutions.size(); ++s) {
        const Solution& a = cs.solutions[s - 1];
        const Solution& b = cs.solutions[s];
        for (int k = 0; k < n; ++k) {
            const double dxi = b.profile.xi(k) - a.profile.xi(k);
            if (k == o || customer_of_o(k)) {
                if (dxi < -tolerance) fail(cs.xi_ok, "xi decreased at " + name(k));
            } else if (std::abs(dxi) > tolerance) {
                fail(cs.xi_ok, "xi changed at unaffected " + name(k));
            }

            const double dl = b.equil.l(k) - a.equil.l(k);
            if (k != o && !supplier_of_o(k) && dl < -tolerance) fail(cs.labor_ok, "labor decreased at " + name(k));
            if (dl > tolerance) labor_nonincreasing[static_cast<std::size_t>(k)] = false;

            if (k != o && !customer_of_o(k) && b.equil.c0(k) - a.equil.c0(k) < -tolerance)
                fail(cs.consumption_ok, "consumption decreased at " + name(k));

            if ((k == o || customer_of_o(k)) && b.equil.p_over_w(k) - a.equil.p_over_w(k) < -tolerance)
                fail(cs.prices_ok, "p/w decreased at " + name(k));
            const double dp = b.equil.p_rel(k) - a.equil.p_rel(k);
            const double v0o = base.leo.v0(o);
            if (L(k, o) >= v0o && dp < -tolerance) fail(cs.prices_ok, "relative price decreased at " + name(k));
            if (L(k, o) <= v0o && dp > tolerance) fail(cs.prices_ok, "relative price increased at " + name(k));
        }
    }
    for (int k = 0; k < n; ++k)
        if ((k == o || supplier_of_o(k)) && labor_nonincreasing[static_cast<std::size_t>(k)]) some_labor_down = true;
    if (!some_labor_down) fail(cs.labor_ok, "no sector among o and its suppliers kept labor non-increasing");
    return cs;
}

}  // namespace rigidnet
