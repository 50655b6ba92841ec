#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kreg/kernel.hpp"
#include "kreg/regression.hpp"

namespace kreg {

// Multiplier distribution for the wild bootstrap. The two-point distribution
// with P(v = (1-sqrt(5))/2) = (5+sqrt(5))/10 matches the first three residual
// moments (mean 0, variance 1, third moment 1); Rademacher (+/-1) is the
// symmetric alternative.
enum class WildWeights { Mammen, Rademacher };

struct WildBootstrapConfig {
    int replications = 250;
    std::uint64_t seed = 0;
    WildWeights weights = WildWeights::Mammen;
    bool plus_one_correction = false;  // p = (1 + count) / (B + 1) instead of count / B
    unsigned threads = 1;
};

struct LinearityTestResult {
    double t_observed = 0.0;
    std::vector<double> bootstrap_t;
    double p_value = 0.0;
    int B = 0;
    std::uint64_t seed = 0;
};

// Kernel smoothing of the parametric fitted values with the same kernel and
// bandwidth as the non-parametric fit:
//   mtilde(X_i) = sum_j K_H(X_i - X_j) m_theta(X_j) / sum_j K_H(X_i - X_j).
// Smoothing both estimators makes their biases comparable under the null.
Eigen::VectorXd smoothed_parametric_fit(const Eigen::MatrixXd& X, const BandwidthMatrix& H,
                                        const LinearFit& theta_fit);

// T = sum_i { mhat_H(X_i) - mtilde(X_i) }^2, the squared gap between the
// kernel fit and the smoothed linear fit.
double t_statistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                   const BandwidthMatrix& H);

// Wild bootstrap of T under the linear null: each replication resamples
// Y_i^b = m_theta(X_i) + e_i * v_i^b, refits the linear model, and recomputes
// T with the same bandwidth. Deterministic given the seed, for any thread
// count.
LinearityTestResult wild_bootstrap_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                        const BandwidthMatrix& H,
                                        const WildBootstrapConfig& config = {});

namespace detail {

// Row-stochastic kernel smoother matrix S with S_ij = K_H(X_i - X_j) / sum_k K_H(X_i - X_k).
Eigen::MatrixXd nw_smoother_matrix(const Eigen::MatrixXd& X, const BandwidthMatrix& H);

// One multiplier draw, a pure function of (seed, replication, observation).
double wild_weight(WildWeights kind, std::uint64_t seed, std::uint64_t replication,
                   std::uint64_t observation);

}  // namespace detail

}  // namespace kreg
