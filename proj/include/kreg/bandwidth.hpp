#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kreg/kernel.hpp"

namespace kreg {

// Penalized in-sample squared error at a candidate bandwidth:
// CV(h) = (1/n) * sum_i (Y_i - mhat_h(X_i))^2 * (1 - W_hi(X_i)/n)^(-2),
// the GCV penalty applied to the full-sample fit. A bandwidth so small that
// an observation carries all of its own weight yields an infinite score
// rather than an error, so a minimizer can back away from it.
struct CvScore {
    double h = 0.0;
    double score = 0.0;
};

struct BandwidthSearchConfig {
    int max_iterations = 500;
    double x_tolerance = 1e-7;
    double f_tolerance = 1e-10;
    bool log_domain = true;  // search over log h so h stays positive
};

struct BandwidthResult {
    double h = 0.0;
    double score = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct BandwidthMatrixResult {
    BandwidthMatrix H;
    std::vector<BandwidthResult> per_column;
};

// Rule-of-thumb bandwidth
//   h_rot = 1.06 * min{ sd(X), (Q3 - Q1)/1.34 } * n^(-1/5)
// with the (n-1)-denominator standard deviation and linear-interpolation
// quartiles. When exactly one spread measure is zero the other is used; when
// both are zero the sample is degenerate.
double silverman_rot(const Eigen::VectorXd& x);

CvScore cv_score(double h, const Eigen::VectorXd& X, const Eigen::VectorXd& Y);

// Minimizes cv_score over h by Nelder-Mead on log h, started from the
// rule-of-thumb value. If the objective is flat across the initial simplex
// the starting value is returned unchanged. A non-converged search returns
// the best bandwidth seen with converged = false; the result is never worse
// than the starting point.
BandwidthResult optimize_bandwidth(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                   const BandwidthSearchConfig& config = {});

// Diagonal bandwidth matrix: column d is selected by a univariate search of
// Y on X(:, d) alone.
BandwidthMatrixResult optimize_bandwidth_matrix(const Eigen::MatrixXd& X,
                                                const Eigen::VectorXd& Y,
                                                const BandwidthSearchConfig& config = {});

}  // namespace kreg
