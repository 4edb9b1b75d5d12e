#include <doctest.h>

#include <cmath>
#include <random>

#include "rigidnet/economy.hpp"
#include "rigidnet/errors.hpp"
#include "rigidnet/scenarios.hpp"
#include "support/oracles.hpp"
#include "support/random_economy.hpp"

using namespace rigidnet;

namespace {

EconomySpec line_spec(double alpha = 0.6) {
    EconomySpec s;
    s.A = Matrix::Zero(4, 4);
    s.A(0, 1) = s.A(1, 2) = s.A(2, 3) = alpha;
    s.gamma = Vector::Constant(4, 0.25);
    s.theta = Vector::Zero(4);
    return s;
}

ErrorCode code_of(const EconomySpec& s) {
    try {
        Economy::validate(s);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("validation unexpectedly succeeded");
    return ErrorCode::InvalidModel;
}

}  // namespace

TEST_CASE("line economy derives the labor shares") {
    const Economy e = Economy::validate(line_spec());
    CHECK(e.beta()(0) == doctest::Approx(1.0));
    for (int k = 1; k < 4; ++k) CHECK(e.beta()(k) == doctest::Approx(0.4));
    CHECK(e.spectral_radius() < 1e-12);
}

TEST_CASE("pure labor economy") {
    EconomySpec s;
    s.A = Matrix::Zero(3, 3);
    s.gamma = Vector::Unit(3, 0);
    s.theta = Vector::Zero(3);
    const Economy e = Economy::validate(s);
    CHECK(e.beta().isApprox(Vector::Ones(3)));
    const LeontiefData leo = leontief(e);
    CHECK(leo.L.isApprox(Matrix::Identity(3, 3)));
    const SupplyRelations rel = suppliers_customers(e, leo);
    CHECK_FALSE(rel.supplier.any());
    CHECK_FALSE(rel.customer.any());
}

TEST_CASE("validation errors") {
    SUBCASE("column sums to one but beta given") {
        EconomySpec s = line_spec();
        s.A(0, 1) = 1.0;
        Vector beta(4);
        beta << 1.0, 0.1, 0.4, 0.4;
        s.beta = beta;
        CHECK(code_of(s) == ErrorCode::ColumnSumViolation);
    }
    SUBCASE("column sum above one") {
        EconomySpec s = line_spec();
        s.A(3, 1) = 0.5;
        CHECK(code_of(s) == ErrorCode::ColumnSumViolation);
    }
    SUBCASE("preferences") {
        EconomySpec s = line_spec();
        s.gamma(0) = 0.3;
        CHECK(code_of(s) == ErrorCode::PreferenceSumViolation);
    }
    SUBCASE("negative entry") {
        EconomySpec s = line_spec();
        s.A(2, 0) = -0.1;
        CHECK(code_of(s) == ErrorCode::NegativeEntry);
    }
    SUBCASE("leverage") {
        EconomySpec s = line_spec();
        s.theta(2) = 1.5;
        CHECK(code_of(s) == ErrorCode::LeverageOutOfRange);
    }
    SUBCASE("dimension") {
        EconomySpec s = line_spec();
        s.theta = Vector::Zero(3);
        CHECK(code_of(s) == ErrorCode::DimensionMismatch);
    }
    SUBCASE("closed network without labor") {
        EconomySpec s;
        s.A = Matrix::Zero(2, 2);
        s.A(0, 1) = s.A(1, 0) = 1.0;
        s.gamma = Vector::Constant(2, 0.5);
        s.theta = Vector::Zero(2);
        CHECK(code_of(s) == ErrorCode::SpectralRadiusNotSubunit);
    }
}

TEST_CASE("line Leontief inverse is the sum of powers of alpha") {
    const Economy e = make_line(4, 0.6);
    const LeontiefData leo = leontief(e);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
            const double expected = k >= j ? std::pow(0.6, k - j) : 0.0;
            CHECK(leo.L(k, j) == doctest::Approx(expected).epsilon(1e-14));
        }
    CHECK(leo.L(1, 0) == doctest::Approx(0.6));
    CHECK(leo.L(2, 0) == doctest::Approx(0.36));
    CHECK(leo.L(3, 0) == doctest::Approx(0.216));
    // v0_1 = (1 + a + a^2 + a^3) / 4
    const double v[] = {0.544, 0.49, 0.4, 0.25};
    for (int k = 0; k < 4; ++k) CHECK(leo.v0(k) == doctest::Approx(v[k]).epsilon(1e-12));
}

TEST_CASE("cycle Leontief inverse is circulant") {
    const double a = 0.6;
    const Economy e = make_cycle(4, a);
    const LeontiefData leo = leontief(e);
    const double d = 1.0 - std::pow(a, 4);
    for (int k = 0; k < 4; ++k)
        for (int o = 0; o < 4; ++o) CHECK(std::abs(leo.L(k, o) - std::pow(a, (k - o + 4) % 4) / d) < 1e-12);
    CHECK(leo.L(0, 0) == doctest::Approx(1.1487).epsilon(1e-4));
    for (int k = 0; k < 4; ++k) CHECK(leo.v0(k) == doctest::Approx(0.625).epsilon(1e-12));
    const SupplyRelations rel = suppliers_customers(e, leo);
    CHECK(rel.supplier.all());
}

TEST_CASE("line supplier relations") {
    const Economy e = make_line(4, 0.6);
    const SupplyRelations rel = suppliers_customers(e, leontief(e));
    for (int k = 1; k < 4; ++k) CHECK(rel.is_supplier(0, k));
    for (int k = 0; k < 4; ++k) CHECK_FALSE(rel.is_supplier(3, k));
    CHECK_FALSE(rel.is_supplier(1, 1));
}

TEST_CASE("random economies: Neumann series, L beta, centrality support") {
    std::mt19937_64 gen(11);
    testing::RandomEconomyOptions opt;
    opt.max_input_share = 0.65;  // keeps the 50-term tail below 1e-8
    for (int trial = 0; trial < 100; ++trial) {
        const Economy e = testing::random_economy(gen, opt);
        const LeontiefData leo = leontief(e);
        Matrix sum = Matrix::Identity(e.n(), e.n()), term = sum;
        for (int h = 1; h <= 50; ++h) {
            term = term * e.A().transpose();
            sum += term;
        }
        CHECK((sum - leo.L).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((leo.L - testing::neumann_leontief(e.A())).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((leo.L * e.beta() - Vector::Ones(e.n())).cwiseAbs().maxCoeff() < 1e-10);

        const BoolMatrix reach = reachability(e.A());
        for (int k = 0; k < e.n(); ++k) {
            bool feeds_consumer = e.gamma()(k) > 0.0;
            for (int j = 0; j < e.n(); ++j)
                if (reach(k, j) && e.gamma()(j) > 0.0) feeds_consumer = true;
            CHECK((leo.v0(k) > 0.0) == feeds_consumer);
        }
    }
}

TEST_CASE("spectral radius estimate brackets the eigenvalues") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Economy e = testing::random_economy(gen);
        Eigen::EigenSolver<Matrix> solver(e.A(), false);
        const double exact = solver.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(e.spectral_radius() == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("with_theta keeps the network") {
    const Economy e = make_line(4, 0.6);
    const Economy f = e.with_theta(Vector::Constant(4, 0.5));
    CHECK(f.A() == e.A());
    CHECK(f.theta()(2) == 0.5);
}
