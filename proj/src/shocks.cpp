#include "rigidnet/shocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rigidnet/errors.hpp"
#include "rigidnet/parallel.hpp"

namespace rigidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbTolerance = 1e-12;
constexpr double kMinAcceptance = 1e-6;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_eta(const Vector& eta, int n, const char* what) {
    if (eta.size() != n)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(eta.size()) +
                                                      " coordinates, expected " + std::to_string(n));
    for (Eigen::Index k = 0; k < eta.size(); ++k) {
        if (!std::isfinite(eta(k))) throw Error(ErrorCode::InvalidModel, std::string(what) + " is not finite");
        if (eta(k) > 0.0) throw Error(ErrorCode::InvalidModel, std::string(what) + " has a positive coordinate");
    }
}

void check_rate(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw Error(ErrorCode::InvalidModel, "exponential rate must be positive and finite");
}

// P(lo < eta <= hi) for eta = -Exp(lambda)
double exp_interval_mass(double lambda, double lo, double hi) {
    hi = std::min(hi, 0.0);
    if (!(lo < hi)) return 0.0;
    if (std::isinf(lo)) return std::exp(lambda * hi);
    return std::exp(lambda * hi) * -std::expm1(lambda * (lo - hi));
}

// P(lo < 0 <= hi), the mass of a coordinate that is identically zero
double zero_mass(double lo, double hi) { return lo < 0.0 && 0.0 <= hi ? 1.0 : 0.0; }

// Prior probability of a box.
double box_mass(const ShockModel& model, const Box& box) {
    return std::visit(
        Overloaded{
            [&](const SingleNodeExponential& s) {
                double p = 1.0;
                for (int k = 0; k < model.n(); ++k)
                    p *= k == s.sector ? exp_interval_mass(s.lambda, box.lower(k), box.upper(k))
                                       : zero_mass(box.lower(k), box.upper(k));
                return p;
            },
            [&](const IndependentExponential& s) {
                double p = 1.0;
                for (int k = 0; k < model.n(); ++k) p *= exp_interval_mass(s.lambda(k), box.lower(k), box.upper(k));
                return p;
            },
            [&](const DiscreteShock& s) {
                double p = 0.0;
                for (const ShockAtom& a : s.support)
                    if (box.contains(a.eta)) p += a.prob;
                return p;
            },
            [&](const DegenerateShock& s) { return box.contains(s.eta) ? 1.0 : 0.0; },
        },
        model.kind());
}

AtomLaw point_mass(const Vector& eta) {
    AtomLaw law;
    law.points = eta;
    law.weights = Vector::Ones(1);
    return law;
}

AtomLaw sample_law(const EngineConfig& engine, const ShockModel& model, const Box* cell) {
    if (engine.num_draws == 0) throw Error(ErrorCode::InvalidModel, "num_draws must be positive");
    const int n = model.n();
    const std::size_t chunks = chunk_count(engine.num_draws);
    std::vector<std::vector<double>> accepted(chunks);
    parallel_chunks(chunks, [&](std::size_t c) {
        std::mt19937_64 gen = chunk_generator(engine.seed, Stream::Expectation, c);
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min<std::size_t>(engine.num_draws, begin + kChunkSize);
        Vector eta(n);
        std::vector<double>& out = accepted[c];
        for (std::size_t i = begin; i < end; ++i) {
            model.sample(gen, eta);
            if (cell && !cell->contains(eta)) continue;
            out.insert(out.end(), eta.data(), eta.data() + n);
        }
    });

    std::size_t total = 0;
    for (const auto& v : accepted) total += v.size() / static_cast<std::size_t>(n);
    if (total == 0) throw Error(ErrorCode::EmptyCell, "no draw fell in the observed signal cell");
    const double rate = static_cast<double>(total) / static_cast<double>(engine.num_draws);
    if (rate < kMinAcceptance)
        throw Error(ErrorCode::InsufficientAcceptance,
                    "cell acceptance rate " + std::to_string(rate) + " is below " + std::to_string(kMinAcceptance));

    AtomLaw law;
    law.sampled = true;
    law.raw_draws = engine.num_draws;
    law.points.resize(n, static_cast<Eigen::Index>(total));
    Eigen::Index col = 0;
    for (const auto& v : accepted) {
        const auto m = static_cast<Eigen::Index>(v.size()) / n;
        if (m > 0) law.points.middleCols(col, m) = Eigen::Map<const Matrix>(v.data(), n, m);
        col += m;
    }
    law.weights = Vector::Constant(static_cast<Eigen::Index>(total), 1.0 / static_cast<double>(total));
    return law;
}

}  // namespace

// ---------------------------------------------------------------------------

ShockModel ShockModel::validate(ShockKind kind, int n) {
    if (n <= 0) throw Error(ErrorCode::DimensionMismatch, "shock dimension must be positive");
    ShockModel m;
    m.n_ = n;
    std::visit(Overloaded{
                   [&](const SingleNodeExponential& s) {
                       if (s.sector < 0 || s.sector >= n)
                           throw Error(ErrorCode::DimensionMismatch, "shocked sector out of range");
                       check_rate(s.lambda);
                   },
                   [&](const IndependentExponential& s) {
                       if (s.lambda.size() != n)
                           throw Error(ErrorCode::DimensionMismatch, "one exponential rate per sector required");
                       for (Eigen::Index k = 0; k < n; ++k) check_rate(s.lambda(k));
                   },
                   [&](const DiscreteShock& s) {
                       if (s.support.empty()) throw Error(ErrorCode::InvalidModel, "discrete support is empty");
                       double total = 0.0;
                       for (const ShockAtom& a : s.support) {
                           check_eta(a.eta, n, "support point");
                           if (!(a.prob >= 0.0) || !std::isfinite(a.prob))
                               throw Error(ErrorCode::InvalidModel, "support probability must be nonnegative");
                           total += a.prob;
                       }
                       if (std::abs(total - 1.0) > kProbTolerance)
                           throw Error(ErrorCode::InvalidModel, "support probabilities sum to " +
                                                                    std::to_string(total) + ", not 1");
                       const ShockAtom* first = nullptr;
                       bool random = false;
                       for (const ShockAtom& a : s.support) {
                           if (a.prob <= 0.0) continue;
                           if (!first) {
                               first = &a;
                           } else if (a.eta != first->eta) {
                               random = true;
                               break;
                           }
                       }
                       if (!random)
                           throw Error(ErrorCode::InvalidModel,
                                       "discrete shock is deterministic; use the degenerate kind");
                       double acc = 0.0;
                       for (const ShockAtom& a : s.support) m.cumulative_.push_back(acc += a.prob);
                   },
                   [&](const DegenerateShock& s) {
                       check_eta(s.eta, n, "degenerate shock");
                       m.warnings_.push_back("degenerate shock: the economy faces no uncertainty");
                   },
               },
               kind);
    m.kind_ = std::move(kind);
    return m;
}

std::optional<int> ShockModel::single_sector() const {
    return std::visit(Overloaded{
                          [](const SingleNodeExponential& s) -> std::optional<int> { return s.sector; },
                          [&](const IndependentExponential&) -> std::optional<int> {
                              if (n_ == 1) return 0;
                              return std::nullopt;
                          },
                          [&](const DiscreteShock& s) -> std::optional<int> {
                              std::optional<int> found;
                              for (int k = 0; k < n_; ++k) {
                                  bool varies = false;
                                  for (const ShockAtom& a : s.support)
                                      if (a.prob > 0.0 && a.eta(k) != 0.0) varies = true;
                                  if (!varies) continue;
                                  if (found) return std::nullopt;
                                  found = k;
                              }
                              return found;
                          },
                          [](const DegenerateShock&) -> std::optional<int> { return std::nullopt; },
                      },
                      kind_);
}

std::string ShockModel::kind_name() const {
    return std::visit(Overloaded{
                          [](const SingleNodeExponential&) { return std::string("single_node_exponential"); },
                          [](const IndependentExponential&) { return std::string("independent_exponential"); },
                          [](const DiscreteShock&) { return std::string("discrete"); },
                          [](const DegenerateShock&) { return std::string("degenerate"); },
                      },
                      kind_);
}

void ShockModel::sample(std::mt19937_64& gen, Eigen::Ref<Vector> out) const {
    std::visit(Overloaded{
                   [&](const SingleNodeExponential& s) {
                       out.setZero();
                       out(s.sector) = std::log(uniform_open0(gen)) / s.lambda;
                   },
                   [&](const IndependentExponential& s) {
                       for (int k = 0; k < n_; ++k) out(k) = std::log(uniform_open0(gen)) / s.lambda(k);
                   },
                   [&](const DiscreteShock& s) {
                       const double u = uniform_open0(gen) * cumulative_.back();
                       auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
                       std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), s.support.size() - 1);
                       while (s.support[i].prob <= 0.0 && i > 0) --i;
                       out = s.support[i].eta;
                   },
                   [&](const DegenerateShock& s) { out = s.eta; },
               },
               kind_);
}

// ---------------------------------------------------------------------------

bool Box::contains(const Eigen::Ref<const Vector>& eta) const {
    for (Eigen::Index k = 0; k < eta.size(); ++k)
        if (!(lower(k) < eta(k) && eta(k) <= upper(k))) return false;
    return true;
}

SignalModel SignalModel::validate(SignalKind kind, const ShockModel& model) {
    if (const auto* part = std::get_if<PartitionSignal>(&kind)) {
        const int n = model.n();
        if (part->cells.empty()) throw Error(ErrorCode::InvalidModel, "partition signal has no cells");
        for (const Box& b : part->cells) {
            if (b.lower.size() != n || b.upper.size() != n)
                throw Error(ErrorCode::DimensionMismatch, "partition cell dimension differs from the shock");
            for (int k = 0; k < n; ++k)
                if (!(b.lower(k) < b.upper(k)) || std::isnan(b.lower(k)) || std::isnan(b.upper(k)))
                    throw Error(ErrorCode::InvalidModel, "partition cell has an empty side");
        }
        for (std::size_t a = 0; a < part->cells.size(); ++a) {
            for (std::size_t b = a + 1; b < part->cells.size(); ++b) {
                const Box& x = part->cells[a];
                const Box& y = part->cells[b];
                bool overlap = true;
                for (int k = 0; k < n && overlap; ++k)
                    overlap = std::max(x.lower(k), y.lower(k)) < std::min(x.upper(k), y.upper(k));
                if (overlap)
                    throw Error(ErrorCode::InvalidModel, "partition cells " + std::to_string(a + 1) + " and " +
                                                             std::to_string(b + 1) + " overlap");
            }
        }
        double covered = 0.0;
        for (const Box& b : part->cells) covered += box_mass(model, b);
        if (covered < 1.0 - kProbTolerance)
            throw Error(ErrorCode::InvalidModel,
                        "partition cells cover probability " + std::to_string(covered) + " of the shock support");
    }
    return SignalModel(std::move(kind));
}

std::string SignalModel::kind_name() const {
    if (is_none()) return "none";
    if (is_full()) return "full";
    return "partition";
}

std::optional<std::size_t> SignalModel::cell_of(const Eigen::Ref<const Vector>& eta) const {
    if (const auto* part = std::get_if<PartitionSignal>(&kind_)) {
        for (std::size_t c = 0; c < part->cells.size(); ++c)
            if (part->cells[c].contains(eta)) return c;
    }
    return std::nullopt;
}

std::size_t SignalModel::num_cells() const {
    if (const auto* part = std::get_if<PartitionSignal>(&kind_)) return part->cells.size();
    return 1;
}

SignalRealization realization_of(const SignalModel& signal, const Vector& eta) {
    if (signal.is_none()) return SignalRealization::unconditional();
    if (signal.is_full()) return SignalRealization::exact(eta);
    const auto cell = signal.cell_of(eta);
    if (!cell) throw Error(ErrorCode::EmptyCell, "shock realization lies outside every signal cell");
    return SignalRealization::in_cell(*cell);
}

// ---------------------------------------------------------------------------

std::string to_string(Backend b) {
    switch (b) {
        case Backend::ExactDiscrete: return "exact_discrete";
        case Backend::AnalyticExponential: return "analytic_exponential";
        case Backend::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

Backend backend_from_string(const std::string& s) {
    if (s == "exact_discrete" || s == "exact") return Backend::ExactDiscrete;
    if (s == "analytic_exponential" || s == "analytic") return Backend::AnalyticExponential;
    if (s == "monte_carlo" || s == "mc") return Backend::MonteCarlo;
    throw Error(ErrorCode::InvalidModel, "unknown expectation backend '" + s + "'");
}

ConditionalLaw condition(const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
                         const SignalRealization& realization) {
    const int n = model.n();
    if (signal.is_full()) {
        if (!realization.eta) throw Error(ErrorCode::InvalidModel, "full-information signal needs the realized shock");
        check_eta(*realization.eta, n, "realized shock");
        return ConditionalLaw(point_mass(*realization.eta), n);
    }

    const Box* cell = nullptr;
    if (const auto* part = std::get_if<PartitionSignal>(&signal.kind())) {
        if (!realization.cell || *realization.cell >= part->cells.size())
            throw Error(ErrorCode::EmptyCell, "partition signal needs a valid observed cell");
        cell = &part->cells[*realization.cell];
    }

    if (const auto* d = std::get_if<DegenerateShock>(&model.kind())) {
        if (cell && !cell->contains(d->eta)) throw Error(ErrorCode::EmptyCell, "observed cell has probability 0");
        return ConditionalLaw(point_mass(d->eta), n);
    }

    if (engine.backend == Backend::MonteCarlo) return ConditionalLaw(sample_law(engine, model, cell), n);

    if (const auto* d = std::get_if<DiscreteShock>(&model.kind())) {
        std::vector<const ShockAtom*> kept;
        double mass = 0.0;
        for (const ShockAtom& a : d->support) {
            if (a.prob <= 0.0 || (cell && !cell->contains(a.eta))) continue;
            kept.push_back(&a);
            mass += a.prob;
        }
        if (kept.empty() || mass <= 0.0) throw Error(ErrorCode::EmptyCell, "observed cell has probability 0");
        AtomLaw law;
        law.points.resize(n, static_cast<Eigen::Index>(kept.size()));
        law.weights.resize(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t i = 0; i < kept.size(); ++i) {
            law.points.col(static_cast<Eigen::Index>(i)) = kept[i]->eta;
            law.weights(static_cast<Eigen::Index>(i)) = kept[i]->prob / mass;
        }
        return ConditionalLaw(std::move(law), n);
    }

    if (engine.backend == Backend::ExactDiscrete)
        throw Error(ErrorCode::UnsupportedShock, "exact_discrete backend needs a discrete shock law");

    const auto* s = std::get_if<SingleNodeExponential>(&model.kind());
    if (!s)
        throw Error(ErrorCode::UnsupportedAnalytic,
                    "analytic backend covers a single exponential shock only; use monte_carlo");
    ExponentialLaw law{s->sector, s->lambda, -kInf, 0.0, 1.0};
    if (cell) {
        for (int k = 0; k < n; ++k)
            if (k != s->sector && zero_mass(cell->lower(k), cell->upper(k)) == 0.0)
                throw Error(ErrorCode::EmptyCell, "observed cell has probability 0");
        law.lo = cell->lower(s->sector);
        law.hi = std::min(0.0, cell->upper(s->sector));
        law.mass = exp_interval_mass(s->lambda, law.lo, law.hi);
        if (!(law.mass > 0.0)) throw Error(ErrorCode::EmptyCell, "observed cell has probability 0");
    }
    return ConditionalLaw(law, n);
}

Integrand Integrand::exp_linear(const Vector& t) {
    Integrand f;
    f.fn = [t](const Eigen::Ref<const Vector>& eta) { return std::exp(t.dot(eta)); };
    f.analytic = [t](const ExponentialLaw& law) {
        return PiecewiseExp(ExpSum::exponential(1.0, t(law.sector)), law.lo, law.hi);
    };
    return f;
}

Estimate expect(const ConditionalLaw& law, const Integrand& f) {
    Estimate est;
    if (const AtomLaw* a = law.atoms()) {
        const Eigen::Index m = a->points.cols();
        Vector values(m);
        for (Eigen::Index i = 0; i < m; ++i) values(i) = f.fn(a->points.col(i));
        est.value = a->weights.dot(values);
        if (a->sampled && m > 1) {
            const double var = (values.array() - est.value).square().sum() / static_cast<double>(m - 1);
            est.std_error = std::sqrt(var / static_cast<double>(m));
        }
        return est;
    }
    const ExponentialLaw& e = *law.exponential();
    if (!f.analytic) throw Error(ErrorCode::UnsupportedAnalytic, "integrand has no closed form");
    est.value = f.analytic(e).integrate_exponential_density(e.lambda) / e.mass;
    return est;
}

Estimate conditional_expectation(const EngineConfig& engine, const ShockModel& model, const SignalModel& signal,
                                 const Integrand& f, const SignalRealization& realization) {
    return expect(condition(engine, model, signal, realization), f);
}

// ---------------------------------------------------------------------------

Vector total_shock(const LeontiefData& leo, const Vector& eta) {
    if (eta.size() != leo.L.rows())
        throw Error(ErrorCode::DimensionMismatch, "shock has " + std::to_string(eta.size()) +
                                                      " coordinates, economy has " + std::to_string(leo.L.rows()));
    return leo.L * eta;
}

NormalizedShocks::NormalizedShocks(const Economy& econ, const LeontiefData& leo, const ConditionalLaw& law)
    : A_(econ.A()), beta_(econ.beta()), L_(leo.L) {
    const int n = econ.n();
    if (law.n() != n) throw Error(ErrorCode::DimensionMismatch, "shock law and economy differ in dimension");

    if (const AtomLaw* a = law.atoms()) {
        sampled_ = a->sampled;
        weights_ = a->weights;
        tau_ = (L_ * a->points).array().exp().matrix();
        expected_exp_rho_ = tau_ * weights_;
        for (int k = 0; k < n; ++k) tau_.row(k) /= expected_exp_rho_(k);
        eps_ = A_.transpose() * tau_;
        eps_.colwise() += beta_;
        return;
    }

    const ExponentialLaw& e = *law.exponential();
    exp_law_ = e;
    const int o = e.sector;
    expected_exp_rho_.resize(n);
    for (int k = 0; k < n; ++k) {
        const PiecewiseExp g(ExpSum::exponential(1.0, L_(k, o)), e.lo, e.hi);
        expected_exp_rho_(k) = g.integrate_exponential_density(e.lambda) / e.mass;
    }
    for (int k = 0; k < n; ++k) {
        tau_fn_.emplace_back(ExpSum::exponential(1.0 / expected_exp_rho_(k), L_(k, o)), e.lo, e.hi);
        std::vector<ExpTerm> terms{{beta_(k), 0.0}};
        for (int j = 0; j < n; ++j)
            if (A_(j, k) != 0.0) terms.push_back({A_(j, k) / expected_exp_rho_(j), L_(j, o)});
        eps_fn_.emplace_back(ExpSum(std::move(terms)), e.lo, e.hi);
    }
}

template <class F>
double NormalizedShocks::atom_mean(int k, F f) const {
    double s = 0.0;
    const Eigen::Index m = tau_.cols();
    for (Eigen::Index i = 0; i < m; ++i) s += weights_(i) * f(tau_(k, i), eps_(k, i));
    return s;
}

double NormalizedShocks::analytic_mean(const PiecewiseExp& f) const {
    return f.integrate_exponential_density(exp_law_->lambda) / exp_law_->mass;
}

double NormalizedShocks::expect_clamp(int k, double x, double theta) const {
    if (!exp_law_) {
        return atom_mean(k, [&](double t, double e) { return std::min(std::max(x * t, (1.0 - theta) * e), x * e); });
    }
    const auto& t = tau_fn_[static_cast<std::size_t>(k)];
    const auto& e = eps_fn_[static_cast<std::size_t>(k)];
    return analytic_mean(PiecewiseExp::clamp(t * x, e * (1.0 - theta), e * x));
}

double NormalizedShocks::expect_min(int k) const {
    if (!exp_law_) return atom_mean(k, [](double t, double e) { return std::min(t, e); });
    return analytic_mean(PiecewiseExp::min(tau_fn_[static_cast<std::size_t>(k)], eps_fn_[static_cast<std::size_t>(k)]));
}

double NormalizedShocks::expect_tau(int k) const {
    if (!exp_law_) return atom_mean(k, [](double t, double) { return t; });
    return analytic_mean(tau_fn_[static_cast<std::size_t>(k)]);
}

double NormalizedShocks::expect_eps(int k) const {
    if (!exp_law_) return atom_mean(k, [](double, double e) { return e; });
    return analytic_mean(eps_fn_[static_cast<std::size_t>(k)]);
}

std::pair<Vector, Vector> NormalizedShocks::at(const Vector& eta) const {
    if (eta.size() != L_.rows()) throw Error(ErrorCode::DimensionMismatch, "shock dimension mismatch");
    Vector tau = (L_ * eta).array().exp().matrix().cwiseQuotient(expected_exp_rho_);
    Vector eps = A_.transpose() * tau + beta_;
    return {std::move(tau), std::move(eps)};
}

std::pair<Vector, Vector> normalized_shocks(const Economy& econ, const LeontiefData& leo,
                                            const EngineConfig& engine, const ShockModel& model,
                                            const SignalModel& signal, const Vector& eta) {
    check_eta(eta, econ.n(), "realized shock");
    const ConditionalLaw law = condition(engine, model, signal, realization_of(signal, eta));
    return NormalizedShocks(econ, leo, law).at(eta);
}

}  // namespace rigidnet
