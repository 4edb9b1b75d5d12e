#include "rigidnet/economy.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rigidnet/errors.hpp"

namespace rigidnet {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ColumnSumViolation: return "ColumnSumViolation";
        case ErrorCode::PreferenceSumViolation: return "PreferenceSumViolation";
        case ErrorCode::SpectralRadiusNotSubunit: return "SpectralRadiusNotSubunit";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::LeverageOutOfRange: return "LeverageOutOfRange";
        case ErrorCode::BetaMismatch: return "BetaMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::EmptyCell: return "EmptyCell";
        case ErrorCode::InsufficientAcceptance: return "InsufficientAcceptance";
        case ErrorCode::UnsupportedAnalytic: return "UnsupportedAnalytic";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::InconsistentProfile: return "InconsistentProfile";
        case ErrorCode::UnsupportedShock: return "UnsupportedShock";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::InvalidAlpha: return "InvalidAlpha";
        case ErrorCode::UnknownTable: return "UnknownTable";
        case ErrorCode::MalformedDocument: return "MalformedDocument";
        case ErrorCode::FileNotFound: return "FileNotFound";
    }
    return "Unknown";
}

namespace {

// x log x with the 0 log 0 = 0 convention
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::string sector_name(int k) { return "sector " + std::to_string(k + 1); }

}  // namespace

SpectralEstimate spectral_radius_nonneg(const Matrix& M, int max_iterations, double tolerance) {
    const auto n = M.rows();
    SpectralEstimate est;
    if (n == 0) return est;
    Vector x = Vector::Ones(n);
    double best_upper = std::numeric_limits<double>::infinity();
    double best_lower = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        Vector y = x + M * x;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ratio = y(i) / x(i);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        best_upper = std::min(best_upper, hi - 1.0);
        best_lower = std::max(best_lower, lo - 1.0);
        est.iterations = it;
        x = y / y.maxCoeff();
        if (best_upper - best_lower < tolerance) break;
    }
    est.upper = best_upper;
    est.value = 0.5 * (best_upper + best_lower);
    if (!(best_upper - best_lower < tolerance)) {
        // reducible matrices can leave the lower bound stuck; use the dense spectrum
        Eigen::EigenSolver<Matrix> solver(M, false);
        est.value = solver.eigenvalues().cwiseAbs().maxCoeff();
        est.upper = std::max(est.upper, est.value);
    }
    return est;
}

Economy Economy::validate(const EconomySpec& spec) {
    const auto n = spec.gamma.size();
    if (n <= 0) throw Error(ErrorCode::DimensionMismatch, "economy must have at least one sector");
    if (spec.A.rows() != n || spec.A.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "A must be n x n with n = len(gamma)");
    if (spec.theta.size() != n) throw Error(ErrorCode::DimensionMismatch, "theta must have length n");
    if (spec.beta && spec.beta->size() != n)
        throw Error(ErrorCode::DimensionMismatch, "beta must have length n");
    if (!spec.A.allFinite() || !spec.gamma.allFinite() || !spec.theta.allFinite() ||
        (spec.beta && !spec.beta->allFinite()))
        throw Error(ErrorCode::NegativeEntry, "economy entries must be finite");

    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            if (spec.A(j, k) < 0.0) {
                std::ostringstream os;
                os << "A(" << j + 1 << "," << k + 1 << ") = " << spec.A(j, k) << " < 0";
                throw Error(ErrorCode::NegativeEntry, os.str());
            }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (spec.gamma(k) < 0.0)
            throw Error(ErrorCode::NegativeEntry, "gamma of " + sector_name(k) + " is negative");
        if (spec.beta && (*spec.beta)(k) < 0.0)
            throw Error(ErrorCode::NegativeEntry, "beta of " + sector_name(k) + " is negative");
        if (spec.theta(k) < 0.0 || spec.theta(k) > 1.0)
            throw Error(ErrorCode::LeverageOutOfRange, "theta of " + sector_name(k) + " outside [0, 1]");
    }

    Economy econ;
    econ.label_ = spec.label;
    econ.A_ = spec.A;
    econ.gamma_ = spec.gamma;
    econ.theta_ = spec.theta;

    const Vector colsum = spec.A.colwise().sum().transpose();
    econ.beta_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double derived = 1.0 - colsum(k);
        if (spec.beta) {
            const double gap = colsum(k) + (*spec.beta)(k) - 1.0;
            if (std::abs(gap) > kBetaMismatchTolerance) {
                std::ostringstream os;
                os << "column " << k + 1 << ": sum_j A_jk + beta_k - 1 = " << gap;
                throw Error(ErrorCode::ColumnSumViolation, os.str());
            }
        } else if (derived < -kSumTolerance) {
            std::ostringstream os;
            os << "column " << k + 1 << " of A sums to " << colsum(k) << " > 1";
            throw Error(ErrorCode::ColumnSumViolation, os.str());
        }
        econ.beta_(k) = std::max(0.0, derived);
    }

    const double gsum = spec.gamma.sum();
    if (std::abs(gsum - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os << "preference weights sum to " << gsum;
        throw Error(ErrorCode::PreferenceSumViolation, os.str());
    }

    // Column-substochastic, so the Collatz-Wielandt upper bound is usually
    // decisive; fall back to a dense eigen-decomposition when it is not.
    const SpectralEstimate est = spectral_radius_nonneg(spec.A);
    double radius = est.value;
    if (est.upper >= 1.0 - kSpectralMargin) {
        Eigen::EigenSolver<Matrix> solver(spec.A, false);
        radius = solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    if (radius >= 1.0 - kSpectralMargin) {
        std::ostringstream os;
        os << "spectral radius of A is " << radius << " (must be < 1)";
        throw Error(ErrorCode::SpectralRadiusNotSubunit, os.str());
    }
    econ.spectral_radius_ = radius;

    econ.sigma_const_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double s = xlogx(econ.beta_(k));
        for (Eigen::Index j = 0; j < n; ++j) s += xlogx(spec.A(j, k));
        econ.sigma_const_(k) = std::exp(-s);
    }
    double g = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) g += xlogx(spec.gamma(k));
    econ.chi_const_ = std::exp(-g);
    return econ;
}

Economy Economy::with_theta(const Vector& theta) const {
    EconomySpec s = spec();
    s.theta = theta;
    return validate(s);
}

EconomySpec Economy::spec() const { return EconomySpec{label_, A_, gamma_, theta_, beta_}; }

Matrix leontief_inverse(const Matrix& A, const Vector& diag_scale) {
    const auto n = A.rows();
    const Matrix system = Matrix::Identity(n, n) - diag_scale.asDiagonal() * A.transpose();
    Eigen::PartialPivLU<Matrix> lu(system);
    if (std::abs(lu.determinant()) < 1e-300)
        throw Error(ErrorCode::SingularSystem, "I - D A' is singular");
    Matrix inv = lu.solve(Matrix::Identity(n, n));
    const double residual = (inv * system - Matrix::Identity(n, n)).cwiseAbs().rowwise().sum().maxCoeff();
    if (!(residual <= 1e-10))
        throw Error(ErrorCode::SingularSystem, "Leontief residual " + std::to_string(residual));
    return inv;
}

BoolMatrix reachability(const Matrix& A) {
    const auto n = A.rows();
    BoolMatrix R = (A.array() > 0.0).matrix();
    // Warshall closure over walks of length >= 1
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index i = 0; i < n; ++i)
            if (R(i, m))
                for (Eigen::Index k = 0; k < n; ++k)
                    if (R(m, k)) R(i, k) = true;
    return R;
}

Matrix leontief_inverse(const Matrix& A, const Vector& diag_scale, const BoolMatrix& reach) {
    Matrix inv = leontief_inverse(A, diag_scale);
    // Roundoff may leave tiny entries where no supply walk exists.
    for (Eigen::Index j = 0; j < A.rows(); ++j)
        for (Eigen::Index k = 0; k < A.rows(); ++k)
            if (j != k && !reach(k, j)) inv(j, k) = 0.0;
    return inv;
}

LeontiefData leontief(const Economy& econ) {
    LeontiefData out;
    out.L = leontief_inverse(econ.A(), Vector::Ones(econ.n()), reachability(econ.A()));
    out.v0 = out.L.transpose() * econ.gamma();
    return out;
}

SupplyRelations suppliers_customers(const Economy& econ, const LeontiefData& leo) {
    const int n = econ.n();
    SupplyRelations rel;
    rel.supplier.setConstant(n, n, false);
    rel.customer.setConstant(n, n, false);
    // Positivity pattern of L taken from the walk structure of A, which is
    // exact where the floating-point inverse is not.
    const BoolMatrix R = reachability(econ.A());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) {
                rel.supplier(j, k) = R(k, k) && leo.L(k, k) > 1.0;
                rel.customer(j, k) = rel.supplier(j, k);
            } else {
                rel.supplier(j, k) = R(j, k) && leo.L(k, j) > 0.0;
                rel.customer(j, k) = R(k, j) && leo.L(j, k) > 0.0;
            }
        }
    }
    return rel;
}

}  // namespace rigidnet
