#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kreg/errors.hpp"

namespace kreg {

// Diagonal bandwidth matrix: one strictly positive smoothing scale per
// regressor dimension. Off-diagonal terms are implicitly zero.
class BandwidthMatrix {
public:
    explicit BandwidthMatrix(std::vector<double> diag);
    static BandwidthMatrix single(double h) { return BandwidthMatrix({h}); }

    std::size_t dim() const noexcept { return diag_.size(); }
    double operator[](std::size_t d) const { return diag_[d]; }
    const std::vector<double>& diag() const noexcept { return diag_; }

private:
    std::vector<double> diag_;
};

// Normalized Nadaraya-Watson weights at an anchor point. Invariants:
// w_i >= 0 and (1/n) * sum_i w_i = 1.
struct WeightVector {
    Eigen::VectorXd w;
    Eigen::VectorXd anchor;
};

// Gaussian kernel K(u) = (2*pi)^(-1/2) * exp(-u^2/2).
double gaussian_kernel(double u);

// Product kernel over dimensions: prod_d K(u_d).
double product_kernel(const Eigen::VectorXd& u);

// Nadaraya-Watson weights w_i = K_H(x - X_i) / ((1/n) * sum_j K_H(x - X_j))
// with K_H evaluated at the componentwise standardized distance
// (x_d - X_id) / h_d. The kernel's constant prefactor cancels in the ratio.
WeightVector nw_weights(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                        const BandwidthMatrix& H);
WeightVector nw_weights(double x, const Eigen::VectorXd& X, double h);

namespace detail {

// All raw kernel values underflow below exp(kLogWeightFloor); the neighborhood
// is then empty rather than silently NaN.
inline constexpr double kLogWeightFloor = -745.0;
// Beyond this standardized distance the exponent sum is shifted before
// exponentiation so the normalizing denominator cannot underflow.
inline constexpr double kLogSpaceTrigger = 37.0;

// exponents[i] = -(1/2) * sum_d u_id^2. Returns weights normalized to mean 1.
Eigen::VectorXd normalize_from_exponents(const Eigen::VectorXd& exponents,
                                         double max_abs_u);

}  // namespace detail

}  // namespace kreg
