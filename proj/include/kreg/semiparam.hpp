#pragma once

#include <Eigen/Dense>

#include "kreg/kernel.hpp"

namespace kreg {

// Semi-parametric risk and performance measures. Each loading is the
// arithmetic mean of its per_point_slopes column and alpha_star the mean of
// per_point_alphas, where per_point_alphas_i = Y_i - sum_d loading_d * X_id.
struct SemiParamMeasures {
    double alpha_star = 0.0;
    Eigen::VectorXd loadings;
    Eigen::MatrixXd per_point_slopes;  // n x D
    Eigen::VectorXd per_point_alphas;  // n
};

struct SemiBeta {
    double beta_star = 0.0;
    Eigen::VectorXd per_point_slopes;
};

struct SemiAlpha {
    double alpha_star = 0.0;
    Eigen::VectorXd per_point_alphas;
};

// Average derivative: local linear slope estimated at every observed X_i,
// then averaged. A single risk measure that stays valid when the regression
// function is not a straight line.
SemiBeta semi_beta(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                   unsigned threads = 1);

// Mean abnormal return after removing beta_star * X:
// alpha_star = (1/n) sum (Y_i - beta_star * X_i).
SemiAlpha semi_alpha(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double beta_star);

// Local slope along a grid; grid points where the weighted design is singular
// (sparse tails) are marked NaN instead of failing the whole curve.
Eigen::VectorXd beta_curve(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                           const Eigen::VectorXd& grid);

// Pointwise abnormal return: the kernel-smoothed local average of
// Y_i - beta_star * X_i, whose sample average recovers the alpha_star above.
// With beta_star = 0 this is the kernel fit itself.
Eigen::VectorXd alpha_curve(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                            double beta_star, const Eigen::VectorXd& grid);

// Multifactor measures: per-point multivariate local-linear slopes averaged
// per column. With D = 1 this reduces exactly to semi_beta / semi_alpha.
SemiParamMeasures semi_params(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                              const BandwidthMatrix& H, unsigned threads = 1);

// Three-factor interface; requires n > 10 and X with exactly 3 columns.
SemiParamMeasures ff3_semi_params(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                  const BandwidthMatrix& H, unsigned threads = 1);

// 101 equally spaced points between the 0.5th and 99.5th percentile of X:
// estimates at the extreme tails are dominated by sparse-data noise, so the
// outermost half percentile is trimmed.
Eigen::VectorXd default_grid(const Eigen::VectorXd& X, int points = 101);

}  // namespace kreg
