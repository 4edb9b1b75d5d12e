#include <doctest.h>

#include <cmath>
#include <random>

#include "rigidnet/errors.hpp"
#include "rigidnet/parallel.hpp"
#include "rigidnet/scenarios.hpp"
#include "rigidnet/shocks.hpp"
#include "support/oracles.hpp"
#include "support/random_economy.hpp"

using namespace rigidnet;

namespace {

const EngineConfig kAnalytic{Backend::AnalyticExponential, 0, 42};

ShockModel line_shock(double lambda = 0.25) { return ShockModel::validate(SingleNodeExponential{1, lambda}, 4); }

Vector at_sector(int n, int k, double x) {
    Vector v = Vector::Zero(n);
    v(k) = x;
    return v;
}

template <class F>
ErrorCode code_of(F f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidModel;
}

}  // namespace

TEST_CASE("total shock on the line and the cycle") {
    const Economy line = make_line(4, 0.6);
    const Vector rho = total_shock(leontief(line), at_sector(4, 1, -2.0));
    const double expect_line[] = {0.0, -2.0, -1.2, -0.72};
    for (int k = 0; k < 4; ++k) CHECK(rho(k) == doctest::Approx(expect_line[k]));
    CHECK(total_shock(leontief(line), Vector::Zero(4)).isZero());

    const Economy cyc = make_cycle(4, 0.6);
    const Vector r = total_shock(leontief(cyc), at_sector(4, 1, -1.0));
    for (int k = 0; k < 4; ++k)
        CHECK(r(k) == doctest::Approx(-std::pow(0.6, (k - 1 + 4) % 4) / (1.0 - std::pow(0.6, 4))));
}

TEST_CASE("conditional expectations of exponentials") {
    const ShockModel m = line_shock();
    const SignalModel none = SignalModel::none();
    SUBCASE("analytic backend against quadrature") {
        for (double a : {1.0, 0.6, 0.36, 2.5, 0.0}) {
            const Estimate e = conditional_expectation(kAnalytic, m, none, Integrand::exp_linear(at_sector(4, 1, a)),
                                                       SignalRealization::unconditional());
            const double oracle = testing::exponential_expectation([&](double x) { return std::exp(a * x); }, 0.25);
            CHECK(e.value == doctest::Approx(oracle).epsilon(1e-10));
            CHECK(e.std_error == 0.0);
        }
        const Estimate e = conditional_expectation(kAnalytic, m, none, Integrand::exp_linear(at_sector(4, 1, 1.0)),
                                                   SignalRealization::unconditional());
        CHECK(e.value == doctest::Approx(0.2).epsilon(1e-14));
        const Estimate e6 = conditional_expectation(kAnalytic, m, none, Integrand::exp_linear(at_sector(4, 1, 0.6)),
                                                    SignalRealization::unconditional());
        CHECK(e6.value == doctest::Approx(0.25 / 0.85).epsilon(1e-14));
    }
    SUBCASE("Monte Carlo backend within 4 standard errors") {
        const EngineConfig mc{Backend::MonteCarlo, 200000, 9};
        const Estimate e = conditional_expectation(mc, m, none, Integrand::exp_linear(at_sector(4, 1, 1.0)),
                                                   SignalRealization::unconditional());
        CHECK(std::abs(e.value - 0.2) < 4.0 * e.std_error);
        CHECK(e.std_error > 0.0);
    }
    SUBCASE("full signal returns the value itself") {
        const Vector eta = at_sector(4, 1, -1.3);
        const Estimate e = conditional_expectation(kAnalytic, m, SignalModel::full(),
                                                   Integrand::exp_linear(at_sector(4, 1, 1.0)),
                                                   SignalRealization::exact(eta));
        CHECK(e.value == doctest::Approx(std::exp(-1.3)));
    }
    SUBCASE("two-point discrete law") {
        DiscreteShock d{{{Vector::Zero(3), 0.5}, {at_sector(3, 0, -1.0), 0.5}}};
        const ShockModel dm = ShockModel::validate(d, 3);
        const Estimate e = conditional_expectation(EngineConfig{Backend::ExactDiscrete, 0, 1}, dm, none,
                                                   Integrand::exp_linear(at_sector(3, 0, 1.0)),
                                                   SignalRealization::unconditional());
        CHECK(e.value == doctest::Approx(0.5 * (1.0 + std::exp(-1.0))).epsilon(1e-15));
    }
}

TEST_CASE("partition cells condition the exponential law") {
    const ShockModel m = line_shock();
    const double inf = INFINITY;
    Box low{Vector::Constant(4, -inf), Vector::Zero(4)}, high{Vector::Constant(4, -inf), Vector::Zero(4)};
    low.upper(1) = -2.0;
    high.lower(1) = -2.0;
    const SignalModel sig = SignalModel::validate(PartitionSignal{{low, high}}, m);
    CHECK(sig.num_cells() == 2);
    CHECK(sig.cell_of(at_sector(4, 1, -3.0)) == std::optional<std::size_t>(0));
    CHECK(sig.cell_of(at_sector(4, 1, -2.0)) == std::optional<std::size_t>(0));  // (lower, upper]
    CHECK(sig.cell_of(at_sector(4, 1, -1.0)) == std::optional<std::size_t>(1));

    const auto f = Integrand::exp_linear(at_sector(4, 1, 1.0));
    const double a = conditional_expectation(kAnalytic, m, sig, f, SignalRealization::in_cell(1)).value;
    const double oracle = testing::exponential_expectation([](double x) { return std::exp(x); }, 0.25, -2.0, 0.0);
    CHECK(a == doctest::Approx(oracle).epsilon(1e-10));

    const EngineConfig mc{Backend::MonteCarlo, 200000, 3};
    const Estimate e = conditional_expectation(mc, m, sig, f, SignalRealization::in_cell(1));
    CHECK(std::abs(e.value - oracle) < 4.0 * e.std_error);

    // cells must cover the support
    CHECK(code_of([&] { SignalModel::validate(PartitionSignal{{low}}, m); }) == ErrorCode::InvalidModel);
}

TEST_CASE("backend restrictions") {
    const ShockModel m = line_shock();
    const EngineConfig exact{Backend::ExactDiscrete, 0, 1};
    CHECK(code_of([&] { condition(exact, m, SignalModel::none(), {}); }) == ErrorCode::UnsupportedShock);
    const ShockModel ind = ShockModel::validate(IndependentExponential{Vector::Constant(4, 1.0)}, 4);
    CHECK(code_of([&] { condition(kAnalytic, ind, SignalModel::none(), {}); }) == ErrorCode::UnsupportedAnalytic);
    CHECK(backend_from_string("mc") == Backend::MonteCarlo);
    CHECK(backend_from_string(to_string(Backend::ExactDiscrete)) == Backend::ExactDiscrete);
    CHECK(code_of([] { backend_from_string("bogus"); }) == ErrorCode::InvalidModel);
}

TEST_CASE("shock model validation") {
    CHECK(code_of([] { ShockModel::validate(SingleNodeExponential{4, 1.0}, 4); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] { ShockModel::validate(SingleNodeExponential{0, -1.0}, 4); }) == ErrorCode::InvalidModel);
    DiscreteShock bad{{{Vector::Constant(2, 0.5), 1.0}}};
    CHECK(code_of([&] { ShockModel::validate(bad, 2); }) == ErrorCode::InvalidModel);
    DiscreteShock unnormalized{{{Vector::Zero(2), 0.7}}};
    CHECK(code_of([&] { ShockModel::validate(unnormalized, 2); }) == ErrorCode::InvalidModel);
    const ShockModel deg = ShockModel::validate(DegenerateShock{Vector::Zero(3)}, 3);
    CHECK_FALSE(deg.warnings().empty());
    CHECK(line_shock().single_sector() == std::optional<int>(1));
}

TEST_CASE("normalized shocks on the line") {
    const Economy e = make_line(4, 0.6);
    const LeontiefData leo = leontief(e);
    const ShockModel m = line_shock();
    for (double x : {-5.0, -2.0, -0.5, 0.0}) {
        const auto [tau, eps] = normalized_shocks(e, leo, kAnalytic, m, SignalModel::none(), at_sector(4, 1, x));
        CHECK(tau(0) == doctest::Approx(1.0));
        CHECK(tau(1) == doctest::Approx(5.0 * std::exp(x)));
        CHECK(tau(2) == doctest::Approx(3.4 * std::exp(0.6 * x)));
        CHECK(eps(1) == doctest::Approx(1.0));
    }
    const auto [tau, eps] = normalized_shocks(e, leo, kAnalytic, m, SignalModel::full(), at_sector(4, 1, -2.0));
    CHECK(tau.isApprox(Vector::Ones(4)));
    CHECK(eps.isApprox(Vector::Ones(4)));
}

TEST_CASE("normalized shocks have unit conditional means") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 40; ++trial) {
        const Economy e = testing::random_economy(gen);
        const ShockModel m = testing::random_discrete_shock(gen, e.n());
        const LeontiefData leo = leontief(e);
        const NormalizedShocks s(e, leo, condition(testing::exact_engine(), m, SignalModel::none(), {}));
        CHECK(s.exact());
        for (int k = 0; k < e.n(); ++k) {
            CHECK(std::abs(s.expect_tau(k) - 1.0) < 1e-12);
            CHECK(std::abs(s.expect_eps(k) - 1.0) < 1e-12);
        }
        // the same expectation from the independent atom oracle
        const auto atoms = testing::atom_shocks(e, std::get<DiscreteShock>(m.kind()));
        CHECK((atoms.mean_exp_rho - s.expected_exp_rho()).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Economy line = make_line(4, 0.6);
    const LeontiefData leo = leontief(line);
    const NormalizedShocks mc(line, leo,
                              condition(EngineConfig{Backend::MonteCarlo, 100000, 5}, line_shock(),
                                        SignalModel::none(), {}));
    CHECK_FALSE(mc.exact());
    for (int k = 0; k < 4; ++k) CHECK(mc.expect_tau(k) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Monte Carlo draws do not depend on the worker count") {
    const EngineConfig mc{Backend::MonteCarlo, 70000, 17};
    const auto f = Integrand::exp_linear(at_sector(4, 1, 0.6));
    setenv("RIGIDNET_THREADS", "1", 1);
    const Estimate a = conditional_expectation(mc, line_shock(), SignalModel::none(), f, {});
    setenv("RIGIDNET_THREADS", "3", 1);
    const Estimate b = conditional_expectation(mc, line_shock(), SignalModel::none(), f, {});
    unsetenv("RIGIDNET_THREADS");
    const Estimate c = conditional_expectation(mc, line_shock(), SignalModel::none(), f, {});
    CHECK(a.value == b.value);
    CHECK(a.value == c.value);
    CHECK(a.std_error == b.std_error);
    const Estimate other =
        conditional_expectation(EngineConfig{Backend::MonteCarlo, 70000, 18}, line_shock(), SignalModel::none(), f, {});
    CHECK(other.value != a.value);
}
