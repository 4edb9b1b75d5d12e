#include "rigidnet/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rigidnet/errors.hpp"

namespace rigidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Bisection for a function with opposite signs at lo and hi.
template <class F>
double bisect(const F& f, double lo, double hi) {
    int slo = sign(f(lo));
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int sm = sign(f(mid));
        if (sm == 0) return mid;
        if (sm == slo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ExpSum::ExpSum(std::vector<ExpTerm> terms) : terms_(std::move(terms)) { normalize(); }

void ExpSum::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const ExpTerm& a, const ExpTerm& b) { return a.rate < b.rate; });
    std::vector<ExpTerm> merged;
    for (const ExpTerm& t : terms_) {
        if (!merged.empty() && merged.back().rate == t.rate) {
            merged.back().coef += t.coef;
        } else {
            merged.push_back(t);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const ExpTerm& t) { return t.coef == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

double ExpSum::operator()(double x) const {
    double s = 0.0;
    for (const ExpTerm& t : terms_) s += t.rate == 0.0 ? t.coef : t.coef * std::exp(t.rate * x);
    return s;
}

ExpSum ExpSum::operator+(const ExpSum& o) const {
    std::vector<ExpTerm> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return ExpSum(std::move(all));
}

ExpSum ExpSum::operator-(const ExpSum& o) const { return *this + o * -1.0; }

ExpSum ExpSum::operator*(double s) const {
    std::vector<ExpTerm> out = terms_;
    for (ExpTerm& t : out) t.coef *= s;
    return ExpSum(std::move(out));
}

ExpSum ExpSum::shifted(double rate) const {
    std::vector<ExpTerm> out = terms_;
    for (ExpTerm& t : out) t.rate += rate;
    return ExpSum(std::move(out));
}

std::vector<double> ExpSum::roots(double a, double b) const {
    std::vector<double> out;
    if (terms_.size() < 2 || !(a < b)) return out;

    // h(x) = exp(-r0 x) f(x) has the sign of f and tends to c0 at -infinity.
    const double r0 = terms_.front().rate;
    const ExpSum h = shifted(-r0);
    std::vector<ExpTerm> dterms;
    for (std::size_t i = 1; i < h.terms_.size(); ++i)
        dterms.push_back({h.terms_[i].coef * h.terms_[i].rate, h.terms_[i].rate});
    const ExpSum dh(std::move(dterms));

    std::vector<double> knots{a};
    for (double c : dh.roots(a, b)) knots.push_back(c);
    knots.push_back(b);

    const double c0 = h.terms_.front().coef;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        double p = knots[s];
        const double q = knots[s + 1];
        const double hq = h(q);
        if (hq == 0.0) {
            out.push_back(q);
            continue;
        }
        double hp;
        if (std::isinf(p)) {
            if (sign(c0) == sign(hq) || c0 == 0.0) continue;
            double step = 1.0;
            p = std::min(q, 0.0) - step;
            while (sign(h(p)) != sign(c0)) {
                step *= 2.0;
                p = std::min(q, 0.0) - step;
                if (step > 1e300) throw Error(ErrorCode::ConvergenceFailure, "exp-sum root bracket diverged");
            }
            hp = h(p);
        } else {
            hp = h(p);
            if (hp == 0.0) {
                out.push_back(p);
                continue;
            }
        }
        if (sign(hp) != sign(hq)) out.push_back(bisect(h, p, q));
    }

    std::sort(out.begin(), out.end());
    std::vector<double> unique;
    for (double r : out)
        if (unique.empty() || r - unique.back() > 1e-14 * std::max(1.0, std::abs(r))) unique.push_back(r);
    return unique;
}

double ExpSum::integrate_exponential_density(double lambda, double a, double b) const {
    double total = 0.0;
    for (const ExpTerm& t : terms_) {
        const double s = t.rate + lambda;
        if (std::isinf(a)) {
            if (!(s > 0.0))
                throw Error(ErrorCode::UnsupportedAnalytic, "integrand grows faster than the density decays");
            total += t.coef * lambda / s * std::exp(s * b);
        } else if (s == 0.0) {
            total += t.coef * lambda * (b - a);
        } else {
            // exp(s b) - exp(s a), accurate for short intervals
            total += t.coef * lambda / s * (-std::exp(s * b) * std::expm1(s * (a - b)));
        }
    }
    return total;
}

PiecewiseExp::PiecewiseExp(const ExpSum& f, double lo, double hi) : lo_(lo), hi_(hi), pieces_{f} {
    if (!(lo < hi)) throw std::invalid_argument("PiecewiseExp: empty domain");
}

double PiecewiseExp::operator()(double x) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return pieces_[static_cast<std::size_t>(it - breaks_.begin())](x);
}

template <class Op>
PiecewiseExp PiecewiseExp::combine(const PiecewiseExp& a, const PiecewiseExp& b, Op op) {
    if (a.lo_ != b.lo_ || a.hi_ != b.hi_) throw std::invalid_argument("PiecewiseExp: domain mismatch");
    PiecewiseExp out;
    out.lo_ = a.lo_;
    out.hi_ = a.hi_;
    std::size_t i = 0, j = 0;
    while (true) {
        out.pieces_.push_back(op(a.pieces_[i], b.pieces_[j]));
        const double na = i < a.breaks_.size() ? a.breaks_[i] : kInf;
        const double nb = j < b.breaks_.size() ? b.breaks_[j] : kInf;
        if (std::isinf(na) && std::isinf(nb)) break;
        if (na < nb) {
            out.breaks_.push_back(na);
            ++i;
        } else if (nb < na) {
            out.breaks_.push_back(nb);
            ++j;
        } else {
            out.breaks_.push_back(na);
            ++i;
            ++j;
        }
    }
    return out;
}

template <class Pick>
PiecewiseExp PiecewiseExp::select(const PiecewiseExp& a, const PiecewiseExp& b, Pick pick) {
    // Pair up pieces on the merged partition, then split each cell at the
    // crossings of a - b and keep whichever side pick() prefers.
    struct Pair {
        ExpSum fa, fb;
    };
    std::vector<Pair> pairs;
    const PiecewiseExp grid = combine(a, b, [&pairs](const ExpSum& x, const ExpSum& y) {
        pairs.push_back({x, y});
        return ExpSum();
    });

    PiecewiseExp out;
    out.lo_ = a.lo_;
    out.hi_ = a.hi_;
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        const double p = c == 0 ? grid.lo_ : grid.breaks_[c - 1];
        const double q = c + 1 == pairs.size() ? grid.hi_ : grid.breaks_[c];
        const ExpSum diff = pairs[c].fa - pairs[c].fb;
        std::vector<double> cuts{p};
        for (double r : diff.roots(p, q))
            if (r > cuts.back() && r < q) cuts.push_back(r);
        cuts.push_back(q);
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double u = cuts[s], v = cuts[s + 1];
            const double probe = std::isinf(u) ? v - 1.0 : 0.5 * (u + v);
            const ExpSum& chosen = pick(diff(probe)) ? pairs[c].fa : pairs[c].fb;
            if (!out.pieces_.empty()) out.breaks_.push_back(u);
            out.pieces_.push_back(chosen);
        }
    }
    return out;
}

PiecewiseExp PiecewiseExp::operator+(const PiecewiseExp& o) const {
    return combine(*this, o, [](const ExpSum& x, const ExpSum& y) { return x + y; });
}

PiecewiseExp PiecewiseExp::operator-(const PiecewiseExp& o) const {
    return combine(*this, o, [](const ExpSum& x, const ExpSum& y) { return x - y; });
}

PiecewiseExp PiecewiseExp::operator*(double s) const {
    PiecewiseExp out = *this;
    for (ExpSum& f : out.pieces_) f = f * s;
    return out;
}

PiecewiseExp PiecewiseExp::min(const PiecewiseExp& a, const PiecewiseExp& b) {
    return select(a, b, [](double d) { return d <= 0.0; });
}

PiecewiseExp PiecewiseExp::max(const PiecewiseExp& a, const PiecewiseExp& b) {
    return select(a, b, [](double d) { return d >= 0.0; });
}

PiecewiseExp PiecewiseExp::clamp(const PiecewiseExp& a, const PiecewiseExp& lower, const PiecewiseExp& upper) {
    return min(max(a, lower), upper);
}

double PiecewiseExp::integrate_exponential_density(double lambda) const {
    double total = 0.0;
    for (std::size_t c = 0; c < pieces_.size(); ++c) {
        const double p = c == 0 ? lo_ : breaks_[c - 1];
        const double q = c + 1 == pieces_.size() ? hi_ : breaks_[c];
        total += pieces_[c].integrate_exponential_density(lambda, p, q);
    }
    return total;
}

}  // namespace rigidnet
