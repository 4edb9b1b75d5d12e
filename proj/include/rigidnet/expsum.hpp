#pragma once

#include <limits>
#include <vector>

namespace rigidnet {

// Functions of one real variable x of the form sum_i c_i exp(r_i x).
// With a single exponential primitive shock every normalized shock, and
// every clamp of them, is piecewise of this form in x = eta_o.
struct ExpTerm {
    double coef = 0.0;
    double rate = 0.0;
};

class ExpSum {
public:
    ExpSum() = default;
    explicit ExpSum(std::vector<ExpTerm> terms);
    static ExpSum constant(double c) { return ExpSum({{c, 0.0}}); }
    static ExpSum exponential(double coef, double rate) { return ExpSum({{coef, rate}}); }

    const std::vector<ExpTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    double operator()(double x) const;

    ExpSum operator+(const ExpSum& o) const;
    ExpSum operator-(const ExpSum& o) const;
    ExpSum operator*(double s) const;

    // Product with exp(rate * x).
    ExpSum shifted(double rate) const;

    // Sorted roots in [a, b]; a may be -infinity. Roots are isolated by
    // recursing on the derivative after factoring out the slowest term, so
    // each returned root is bracketed rigorously.
    std::vector<double> roots(double a, double b) const;

    // Integral of f(x) * lambda * exp(lambda x) over [a, b] (a may be -inf).
    double integrate_exponential_density(double lambda, double a, double b) const;

private:
    void normalize();
    std::vector<ExpTerm> terms_;  // sorted by rate, merged, zero coefficients dropped
};

// Piecewise ExpSum on [lo, hi] with sorted interior breakpoints.
class PiecewiseExp {
public:
    PiecewiseExp() = default;
    PiecewiseExp(const ExpSum& f, double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<ExpSum>& pieces() const { return pieces_; }
    double operator()(double x) const;

    PiecewiseExp operator+(const PiecewiseExp& o) const;
    PiecewiseExp operator-(const PiecewiseExp& o) const;
    PiecewiseExp operator*(double s) const;

    static PiecewiseExp min(const PiecewiseExp& a, const PiecewiseExp& b);
    static PiecewiseExp max(const PiecewiseExp& a, const PiecewiseExp& b);
    // min(max(a, lower), upper)
    static PiecewiseExp clamp(const PiecewiseExp& a, const PiecewiseExp& lower, const PiecewiseExp& upper);

    double integrate_exponential_density(double lambda) const;

private:
    template <class Op>
    static PiecewiseExp combine(const PiecewiseExp& a, const PiecewiseExp& b, Op op);
    template <class Pick>
    static PiecewiseExp select(const PiecewiseExp& a, const PiecewiseExp& b, Pick pick);

    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = 0.0;
    std::vector<double> breaks_;  // size pieces_.size() - 1
    std::vector<ExpSum> pieces_;
};

}  // namespace rigidnet
