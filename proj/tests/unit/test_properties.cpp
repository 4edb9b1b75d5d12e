#include <doctest.h>

#include "support/property_suite.hpp"

using namespace rigidnet;

TEST_CASE("randomized invariants") {
    testing::InvariantReport rep = testing::run_property_suite(60, 2024);
    for (const testing::Check* c : rep.all()) {
        CAPTURE(c->name);
        for (const std::string& note : c->notes) MESSAGE(note);
        CHECK(c->evaluated > 0);
        CHECK(c->failures == 0);
    }
    MESSAGE("smallest slack with costly debt: " << rep.min_slack_nonzero_zeta);
}

TEST_CASE("walk sums and Neumann series agree with the inverse") {
    const testing::WalkReport rep = testing::run_walk_oracle(20, 7);
    for (const std::string& note : rep.agreement.notes) MESSAGE(note);
    CHECK(rep.agreement.ok());
}

TEST_CASE("the slack vanishes exactly when the walk wedge is constant") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Economy e = testing::random_economy(gen);
        const LeontiefData leo = leontief(e);
        Vector zeta(e.n());
        for (int k = 0; k < e.n(); ++k) zeta(k) = u(gen) < 0.3 ? 0.0 : u(gen);
        const DebtProfile p = debt_profile(e, leo, zeta);
        const double slack = std::log(p.psi) + leo.v0.dot(zeta);
        const double var = testing::walk_wedge_variance(e, zeta);
        CAPTURE(trial);
        CHECK(var >= -1e-12);
        if (var > 1e-6) CHECK(slack > 0.0);
        if (var < 1e-14) CHECK(std::abs(slack) < 1e-12);
    }
    // a constant cost of debt on a network without links leaves no slack
    EconomySpec s;
    s.A = Matrix::Zero(2, 2);
    s.gamma = Vector::Constant(2, 0.5);
    s.theta = Vector::Zero(2);
    const Economy flat = Economy::validate(s);
    const Vector c = Vector::Constant(2, 0.4);
    const DebtProfile p = debt_profile(flat, leontief(flat), c);
    CHECK(std::abs(std::log(p.psi) + leontief(flat).v0.dot(c)) < 1e-15);
}
