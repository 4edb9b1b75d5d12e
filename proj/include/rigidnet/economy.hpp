#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace rigidnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Raw economy description as read from a document, before validation.
// A(j, k) is the importance of product j in sector k's technology.
struct EconomySpec {
    std::string label;
    Matrix A;
    Vector gamma;
    Vector theta;
    std::optional<Vector> beta;
};

/**
 * A validated constant returns-to-scale Cobb-Douglas production network with
 * sector leverage. Immutable once constructed; use with_theta() to obtain a
 * copy at a different leverage vector.
 *
 * Invariants enforced by validate():
 *  - column sums of A plus the labor share equal one (within 1e-12);
 *  - preference weights are nonnegative and sum to one (within 1e-12);
 *  - the spectral radius of A is strictly below one;
 *  - leverage lies in [0, 1].
 */
class Economy {
public:
    static constexpr double kSumTolerance = 1e-12;
    static constexpr double kBetaMismatchTolerance = 1e-9;
    static constexpr double kSpectralMargin = 1e-9;

    static Economy validate(const EconomySpec& spec);

    int n() const { return static_cast<int>(gamma_.size()); }
    const std::string& label() const { return label_; }
    const Matrix& A() const { return A_; }
    const Vector& beta() const { return beta_; }
    const Vector& gamma() const { return gamma_; }
    const Vector& theta() const { return theta_; }
    // varsigma_k = beta_k^{-beta_k} prod_j A_jk^{-A_jk}, with 0^0 = 1
    const Vector& sigma_const() const { return sigma_const_; }
    // chi = prod_k gamma_k^{-gamma_k}
    double chi_const() const { return chi_const_; }
    double spectral_radius() const { return spectral_radius_; }

    Economy with_theta(const Vector& theta) const;
    EconomySpec spec() const;

private:
    Economy() = default;

    std::string label_;
    Matrix A_;
    Vector beta_;
    Vector gamma_;
    Vector theta_;
    Vector sigma_const_;
    double chi_const_ = 1.0;
    double spectral_radius_ = 0.0;
};

// Leontief inverse L = (I - A')^{-1} and Bonacich centrality
// v0_k = sum_j gamma_j L_jk.
struct LeontiefData {
    Matrix L;
    Vector v0;
};

LeontiefData leontief(const Economy& econ);

// Solves (I - D A') X = I for a nonnegative diagonal D given by its entries.
// Shared by the plain and the discounted Leontief inverse.
Matrix leontief_inverse(const Matrix& A, const Vector& diag_scale);
// Same, with entries that no supply walk reaches forced to exact zero.
Matrix leontief_inverse(const Matrix& A, const Vector& diag_scale, const BoolMatrix& reach);

// R(j, k) is true when a walk of length >= 1 leads from j to k along edges
// with A > 0, i.e. j is a (direct or indirect) supplier of k.
BoolMatrix reachability(const Matrix& A);

// Supplier/customer relations derived from L:
//  supplier(j, k): j != k and L_kj > 0, or j == k and L_kk > 1
//  customer(j, k): j != k and L_jk > 0, or j == k and L_kk > 1
struct SupplyRelations {
    BoolMatrix supplier;
    BoolMatrix customer;

    bool is_supplier(int j, int k) const { return supplier(j, k); }
    bool is_customer(int j, int k) const { return customer(j, k); }
};

SupplyRelations suppliers_customers(const Economy& econ, const LeontiefData& leo);

struct SpectralEstimate {
    double value = 0.0;  // best estimate of the spectral radius
    double upper = 0.0;  // Collatz-Wielandt upper bound
    int iterations = 0;
};

// Power iteration on I + M (aperiodic for nonnegative M) with
// Collatz-Wielandt bracketing. M must be entrywise nonnegative.
SpectralEstimate spectral_radius_nonneg(const Matrix& M, int max_iterations = 1000,
                                        double tolerance = 1e-10);

}  // namespace rigidnet
