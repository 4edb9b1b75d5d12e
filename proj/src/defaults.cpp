#include "rigidnet/defaults.hpp"

#include <algorithm>
#include <cmath>

#include "rigidnet/equilibrium.hpp"
#include "rigidnet/errors.hpp"
#include "rigidnet/expsum.hpp"

namespace rigidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return g;
}

template <class Pred>
bool holds_on_grid(double lo, double hi, Pred pred) {
    for (double t : grid(lo, hi, kTiltGridPoints))
        if (!pred(t)) return false;
    return true;
}

}  // namespace

TiltedMoments::TiltedMoments(const ConditionalLaw& law, int o) : o_(o) {
    if (const ExponentialLaw* e = law.exponential()) {
        if (e->sector != o) throw Error(ErrorCode::UnsupportedShock, "tilting a coordinate that carries no shock");
        exponential_ = true;
        lambda_ = e->lambda;
        lo_ = e->lo;
        hi_ = e->hi;
        return;
    }
    const AtomLaw& a = *law.atoms();
    for (Eigen::Index i = 0; i < a.points.cols(); ++i) {
        x_.push_back(a.points(o, i));
        w_.push_back(a.weights(i));
    }
}

TiltedMoments::Moments TiltedMoments::at(double t) const {
    if (exponential_) {
        // The tilted law is exponential with rate mu on (lo, hi]; work with
        // u = eta - hi <= 0.
        const double mu = t + lambda_;
        if (std::isinf(lo_)) return {hi_ - 1.0 / mu, 1.0 / (mu * mu)};
        const double a = lo_ - hi_;
        if (mu * -a < 1e-4) return {hi_ + a / 2.0 + mu * a * a / 12.0, a * a / 12.0};
        const double ea = std::exp(mu * a);
        const double z = -std::expm1(mu * a) / mu;
        const double e1 = (-1.0 / (mu * mu) - ea * (a / mu - 1.0 / (mu * mu))) / z;
        const double e2 = (2.0 / (mu * mu * mu) - ea * (a * a / mu - 2.0 * a / (mu * mu) + 2.0 / (mu * mu * mu))) / z;
        return {hi_ + e1, std::max(0.0, e2 - e1 * e1)};
    }
    double shift = -kInf;
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (w_[i] > 0.0) shift = std::max(shift, t * x_[i]);
    double z = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double wt = w_[i] * std::exp(t * x_[i] - shift);
        z += wt;
        s1 += wt * x_[i];
    }
    const double m1 = s1 / z;
    double var = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double d = x_[i] - m1;
        var += w_[i] * std::exp(t * x_[i] - shift) * d * d;
    }
    return {m1, var / z};
}

double TiltedMoments::m1(double t) const { return at(t).m1; }

double TiltedMoments::m2(double t) const {
    const Moments m = at(t);
    return m.var + m.m1 * m.m1;
}

double TiltedMoments::sigma(double t) const { return std::sqrt(at(t).var); }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Never: return "NEVER";
        case Verdict::NoDefault: return "NO_DEFAULT";
        case Verdict::Default: return "DEFAULT";
        case Verdict::Undetermined: return "UNDETERMINED";
    }
    return "UNKNOWN";
}

bool exact_default_predicate(const Vector& tau, const Vector& epsilon, int k) {
    return default_predicate(tau(k), epsilon(k));
}

DefaultClassification classify_defaults_single_shock(const Economy& econ, const LeontiefData& leo,
                                                     const ShockModel& model, const ConditionalLaw& law,
                                                     double eta_o) {
    const auto single = model.single_sector();
    if (!single) throw Error(ErrorCode::UnsupportedShock, "classification needs a shock concentrated on one sector");
    const int o = *single;
    const int n = econ.n();
    const Matrix& A = econ.A();
    const Matrix& L = leo.L;

    DefaultClassification c;
    c.o = o;
    c.eta_o = eta_o;
    c.L_minus = Vector::Zero(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (A(j, k) > 0.0) c.L_minus(k) = std::max(c.L_minus(k), L(j, o));

    const TiltedMoments tm(law, o);
    const double x = eta_o;
    const auto inside = [&](double t) {
        const double m = tm.m1(t), s = tm.sigma(t);
        return m - s <= x && x <= m + s;
    };
    const auto far_below = [&](double t) { return x < tm.m1(t) - tm.sigma(t); };
    const auto outside = [&](double t) { return !inside(t); };

    const double t_max = std::max(1.0, 2.0 * c.L_minus.maxCoeff());
    const double t_out = std::max({t_max, L(o, o), c.L_minus(o) + 1.0});
    const ExponentialLaw* e = law.exponential();
    const bool closed_form = e && std::isinf(e->lo) && e->hi == 0.0;

    if (closed_form) {
        const double lambda = e->lambda;
        if (x >= -2.0 / lambda) {
            c.t_bar = x == 0.0 ? kInf : -2.0 / x - lambda;
        } else {
            c.t_bar = -1.0;
        }
        c.outside_everywhere = x < -2.0 / lambda;
    } else {
        const std::vector<double> g = grid(0.0, t_max, kTiltGridPoints);
        if (!inside(0.0)) {
            c.t_bar = -1.0;
        } else {
            c.t_bar = t_max;
            for (std::size_t i = 1; i < g.size(); ++i) {
                if (inside(g[i])) continue;
                double lo = g[i - 1], hi = g[i];
                while (hi - lo > kTiltRefineTolerance) {
                    const double mid = 0.5 * (lo + hi);
                    if (inside(mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                c.t_bar = lo;
                break;
            }
        }
        c.outside_everywhere = holds_on_grid(0.0, t_out, outside);
    }

    c.verdicts.assign(static_cast<std::size_t>(n), Verdict::Undetermined);
    for (int k = 0; k < n; ++k) {
        if (k == o) continue;
        Verdict& v = c.verdicts[static_cast<std::size_t>(k)];
        if (L(k, o) == 0.0) {
            v = Verdict::Never;
        } else if (c.t_bar >= c.L_minus(k)) {
            v = Verdict::NoDefault;
        } else if (c.outside_everywhere) {
            // Strict default needs the supplier mix to be non-degenerate;
            // otherwise tau_k and eps_k coincide.
            double lo = kInf, hi = -kInf;
            for (int j = 0; j < n; ++j) {
                if (A(j, k) <= 0.0) continue;
                lo = std::min(lo, L(j, o));
                hi = std::max(hi, L(j, o));
            }
            if (econ.beta()(k) > 0.0) lo = std::min(lo, 0.0);
            if (hi - lo > 1e-12 * std::max(1.0, hi)) v = Verdict::Default;
        }
    }

    Verdict& vo = c.verdicts[static_cast<std::size_t>(o)];
    if (!reachability(A)(o, o)) {
        Vector t = Vector::Zero(n);
        t(o) = 1.0;
        const double mean = expect(law, Integrand::exp_linear(t)).value;
        vo = std::exp(x) < mean ? Verdict::Default : Verdict::NoDefault;
    } else if (closed_form) {
        const double lambda = e->lambda;
        // [m1, m1 + sigma] = [-1/(t + lambda), 0] shrinks as t grows, so the
        // right end of [0, L-_o + 1] binds
        if (x >= -1.0 / (c.L_minus(o) + 1.0 + lambda)) {
            vo = Verdict::NoDefault;
        } else if (x < -2.0 / lambda) {
            vo = Verdict::Default;
        }
    } else {
        const auto upper_half = [&](double t) {
            const double m = tm.m1(t);
            return m <= x && x <= m + tm.sigma(t);
        };
        if (holds_on_grid(0.0, c.L_minus(o) + 1.0, upper_half)) {
            vo = Verdict::NoDefault;
        } else if (holds_on_grid(0.0, t_out, far_below)) {
            vo = Verdict::Default;
        }
    }
    return c;
}

LineThresholds line_thresholds(double alpha, double lambda, int n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidModel, "lambda must be positive");
    if (n < 2) throw Error(ErrorCode::DimensionMismatch, "a line needs at least two sectors");
    LineThresholds out;
    out.x_star = Vector::Constant(n, -kInf);
    out.default_prob = Vector::Zero(n);
    out.x_star(1) = std::log(lambda / (1.0 + lambda));
    const double target = lambda * (1.0 - alpha);
    for (int k = 3; k <= n; ++k) {
        const double a2 = std::pow(alpha, k - 2);
        const double a3 = std::pow(alpha, k - 3);
        // f_k(x) - lambda (1 - alpha); x = 0 is always a root, the threshold
        // is the other one.
        const ExpSum f({{a2 + lambda, a2}, {-(a2 + alpha * lambda), a3}, {-target, 0.0}});
        double right = -1e-6;
        while (!(f(right) > 0.0)) {
            right *= 0.5;
            if (right > -1e-300) throw Error(ErrorCode::ConvergenceFailure, "threshold bracket not found");
        }
        const std::vector<double> roots = f.roots(-kInf, right);
        if (roots.empty()) throw Error(ErrorCode::ConvergenceFailure, "no default threshold found");
        out.x_star(k - 1) = roots.back();
    }
    for (int k = 1; k < n; ++k) out.default_prob(k) = std::exp(lambda * out.x_star(k));
    return out;
}

bool cycle_default_condition(double alpha, double lambda, int n, int k, int o, double eta_o,
                             CycleConvention convention) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
    if (k < 0 || k >= n || o < 0 || o >= n) throw Error(ErrorCode::DimensionMismatch, "sector out of range");
    int own, pred, power;
    if (convention == CycleConvention::Literal) {
        const int label = k + 1;
        own = label > 1 ? label : 0;
        pred = label > 1 ? label - 1 : n;
        power = n + 1;
    } else {
        own = ((k - o) % n + n) % n;
        pred = (own - 1 + n) % n;
        power = n;
    }
    const double denom = 1.0 - std::pow(alpha, power);
    const auto ell = [&](int i) { return std::pow(alpha, i) / denom; };
    // Split off the value at eta_o = 0, which is (l_own - alpha l_pred) / lambda:
    // zero except where the walk wraps around, where it is 1 / lambda.
    const double at_zero = own == 0 ? 1.0 / lambda : 0.0;
    const auto moved = [&](int i) { return std::expm1(ell(i) * eta_o) * (ell(i) + lambda) / lambda; };
    return at_zero + moved(own) - alpha * moved(pred) < 0.0;
}

}  // namespace rigidnet
