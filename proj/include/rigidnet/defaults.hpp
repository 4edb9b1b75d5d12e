#pragma once

#include <string>
#include <vector>

#include "rigidnet/economy.hpp"
#include "rigidnet/shocks.hpp"

namespace rigidnet {

// First two moments of the exponential tilting of eta_o,
//   m_k(t) = E[eta_o^k exp(t eta_o)] / E[exp(t eta_o)].
class TiltedMoments {
public:
    TiltedMoments(const ConditionalLaw& law, int o);

    double m1(double t) const;
    double m2(double t) const;
    double sigma(double t) const;

private:
    struct Moments {
        double m1, var;
    };
    Moments at(double t) const;

    int o_;
    std::vector<double> x_;  // atoms of eta_o
    std::vector<double> w_;
    bool exponential_ = false;
    double lambda_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

enum class Verdict { Never, NoDefault, Default, Undetermined };

std::string to_string(Verdict v);

struct DefaultClassification {
    int o = 0;
    double eta_o = 0.0;
    std::vector<Verdict> verdicts;
    Vector L_minus;  // L^-_k = max{L_jo : A_jk > 0}, 0 without suppliers
    // Largest t with eta_o inside [m1 - sigma, m1 + sigma] on [0, t];
    // negative when eta_o is already outside at t = 0, +inf when it never
    // leaves on the scanned range and the law is exponential.
    double t_bar = 0.0;
    bool outside_everywhere = false;  // eta_o outside the interval for every scanned t
};

inline constexpr int kTiltGridPoints = 256;
inline constexpr double kTiltRefineTolerance = 1e-9;

DefaultClassification classify_defaults_single_shock(const Economy& econ, const LeontiefData& leo,
                                                     const ShockModel& model, const ConditionalLaw& law,
                                                     double eta_o);

// tau_k < eps_k
bool exact_default_predicate(const Vector& tau, const Vector& epsilon, int k);

// Line economy shocked at sector 2 (index 1): sector k defaults iff
// eta_2 < x*_k. Entry k of the result is x*_k; sector 1 never defaults and
// gets -inf.
struct LineThresholds {
    Vector x_star;
    Vector default_prob;  // exp(lambda x*_k) under the exponential law
};

LineThresholds line_thresholds(double alpha, double lambda, int n = 4);

// Closed-form default condition for a directed cycle with an exponential
// shock at sector o. Two readings of the node indexing are offered:
//  Literal: l_k = alpha^k / (1 - alpha^(n+1)) with k the 1-based sector label;
//  Distance: l_d = alpha^d / (1 - alpha^n) with d the distance from o along
//            the cycle, which is the Leontief column of o.
enum class CycleConvention { Literal, Distance };

bool cycle_default_condition(double alpha, double lambda, int n, int k, int o, double eta_o,
                             CycleConvention convention);

}  // namespace rigidnet
