#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "rigidnet/economy.hpp"
#include "rigidnet/expsum.hpp"

namespace rigidnet {

// ---------------------------------------------------------------------------
// Shock laws. Sector indices are zero-based in the API.

struct SingleNodeExponential {
    int sector = 0;       // o
    double lambda = 1.0;  // -eta_o ~ Exp(lambda)
};

struct IndependentExponential {
    Vector lambda;
};

struct ShockAtom {
    Vector eta;
    double prob = 0.0;
};

struct DiscreteShock {
    std::vector<ShockAtom> support;
};

// Admitted only to exercise full-information code paths.
struct DegenerateShock {
    Vector eta;
};

using ShockKind = std::variant<SingleNodeExponential, IndependentExponential, DiscreteShock, DegenerateShock>;

class ShockModel {
public:
    static ShockModel validate(ShockKind kind, int n);

    const ShockKind& kind() const { return kind_; }
    int n() const { return n_; }
    bool is_degenerate() const { return std::holds_alternative<DegenerateShock>(kind_); }
    // Sector o when the law is concentrated on one sector (single-node
    // exponential, or a discrete law whose atoms vary in one coordinate).
    std::optional<int> single_sector() const;
    std::string kind_name() const;
    const std::vector<std::string>& warnings() const { return warnings_; }

    void sample(std::mt19937_64& gen, Eigen::Ref<Vector> out) const;

private:
    ShockKind kind_;
    int n_ = 0;
    std::vector<double> cumulative_;  // discrete inverse-CDF table
    std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Public signal. Partition cells are boxes prod_k (lower_k, upper_k];
// lower_k may be -infinity.

struct Box {
    Vector lower;
    Vector upper;
    bool contains(const Eigen::Ref<const Vector>& eta) const;
};

struct NoSignal {};
struct FullSignal {};
struct PartitionSignal {
    std::vector<Box> cells;
};

using SignalKind = std::variant<NoSignal, FullSignal, PartitionSignal>;

class SignalModel {
public:
    // Checks dimensions, disjointness of the cells, and that they cover the
    // support of the shock law (probability computed exactly per cell).
    static SignalModel validate(SignalKind kind, const ShockModel& model);
    static SignalModel none() { return SignalModel(NoSignal{}); }
    static SignalModel full() { return SignalModel(FullSignal{}); }

    const SignalKind& kind() const { return kind_; }
    bool is_full() const { return std::holds_alternative<FullSignal>(kind_); }
    bool is_none() const { return std::holds_alternative<NoSignal>(kind_); }
    std::string kind_name() const;
    std::optional<std::size_t> cell_of(const Eigen::Ref<const Vector>& eta) const;
    std::size_t num_cells() const;

private:
    explicit SignalModel(SignalKind kind) : kind_(std::move(kind)) {}
    SignalKind kind_;
};

// What the actors observed: nothing, a partition cell, or (full
// information) the shock itself.
struct SignalRealization {
    std::optional<std::size_t> cell;
    std::optional<Vector> eta;

    static SignalRealization unconditional() { return {}; }
    static SignalRealization in_cell(std::size_t c) { return {c, std::nullopt}; }
    static SignalRealization exact(Vector e) { return {std::nullopt, std::move(e)}; }
};

// The realization containing eta under the given signal.
SignalRealization realization_of(const SignalModel& signal, const Vector& eta);

// ---------------------------------------------------------------------------
// Expectation engine.

enum class Backend { ExactDiscrete, AnalyticExponential, MonteCarlo };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct EngineConfig {
    Backend backend = Backend::AnalyticExponential;
    std::uint64_t num_draws = 1'000'000;
    std::uint64_t seed = 42;
};

// Weighted atoms: exact discrete laws, point masses, and Monte Carlo
// samples (equal weights). Atoms are the columns of `points`.
struct AtomLaw {
    Matrix points;
    Vector weights;
    bool sampled = false;
    std::uint64_t raw_draws = 0;
};

// -eta_o ~ Exp(lambda) truncated to eta_o in (lo, hi]; all other
// coordinates are zero.
struct ExponentialLaw {
    int sector = 0;
    double lambda = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double mass = 1.0;  // prior probability of (lo, hi]
};

class ConditionalLaw {
public:
    ConditionalLaw(AtomLaw law, int n) : law_(std::move(law)), n_(n) {}
    ConditionalLaw(ExponentialLaw law, int n) : law_(law), n_(n) {}

    int n() const { return n_; }
    const AtomLaw* atoms() const { return std::get_if<AtomLaw>(&law_); }
    const ExponentialLaw* exponential() const { return std::get_if<ExponentialLaw>(&law_); }
    bool sampled() const { return atoms() && atoms()->sampled; }

private:
    std::variant<AtomLaw, ExponentialLaw> law_;
    int n_;
};

// Law of eta given the observed signal realization, in the representation
// required by the chosen backend.
ConditionalLaw condition(const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
                         const SignalRealization& realization);

struct Integrand {
    std::function<double(const Eigen::Ref<const Vector>&)> fn;
    // Closed form in x = eta_o over the law's interval, for the analytic
    // backend; absent means the integrand is outside its family.
    std::function<PiecewiseExp(const ExponentialLaw&)> analytic;

    // exp(t . eta)
    static Integrand exp_linear(const Vector& t);
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;  // zero for exact backends
};

Estimate expect(const ConditionalLaw& law, const Integrand& f);

Estimate conditional_expectation(const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
                                 const Integrand& f, const SignalRealization& realization);

// ---------------------------------------------------------------------------
// Total and normalized shocks.

// rho = L eta
Vector total_shock(const LeontiefData& leo, const Vector& eta);

/**
 * Information-normalized shocks under a conditional law:
 *   tau_k = exp(rho_k) / E[exp(rho_k) | signal],
 *   eps_k = sum_j tau_j A_jk + beta_k.
 * Holds either per-atom values or closed forms in eta_o, and evaluates the
 * expectations the cost-of-debt solver needs on the same representation.
 */
class NormalizedShocks {
public:
    NormalizedShocks(const Economy& econ, const LeontiefData& leo, const ConditionalLaw& law);

    int n() const { return static_cast<int>(expected_exp_rho_.size()); }
    // E[exp(rho_k) | signal]
    const Vector& expected_exp_rho() const { return expected_exp_rho_; }
    bool exact() const { return !sampled_; }

    // E[clamp(x tau_k, (1 - theta) eps_k, x eps_k) | signal]
    double expect_clamp(int k, double x, double theta) const;
    // E[min(tau_k, eps_k) | signal]
    double expect_min(int k) const;
    double expect_tau(int k) const;
    double expect_eps(int k) const;

    // (tau, eps) at a realization eta
    std::pair<Vector, Vector> at(const Vector& eta) const;

    const Matrix& L() const { return L_; }

private:
    Matrix A_;
    Vector beta_;
    Matrix L_;
    Vector expected_exp_rho_;
    bool sampled_ = false;

    // atom representation: columns are atoms
    Matrix tau_;
    Matrix eps_;
    Vector weights_;

    // closed-form representation
    std::optional<ExponentialLaw> exp_law_;
    std::vector<PiecewiseExp> tau_fn_;
    std::vector<PiecewiseExp> eps_fn_;

    template <class F>
    double atom_mean(int k, F f) const;
    double analytic_mean(const PiecewiseExp& f) const;
};

// (tau, eps) at eta, with expectations taken given the signal realization
// that contains eta.
std::pair<Vector, Vector> normalized_shocks(const Economy& econ, const LeontiefData& leo,
                                            const EngineConfig& engine, const ShockModel& model,
                                            const SignalModel& signal, const Vector& eta);

}  // namespace rigidnet
