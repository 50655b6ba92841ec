#pragma once

#include <Eigen/Dense>

#include "kreg/kernel.hpp"

namespace kreg {

// Fitted Nadaraya-Watson regression evaluated at the sample points.
// fitted + residuals reproduces Y elementwise; r_squared = 1 - SSE/SST.
struct KernelFit {
    BandwidthMatrix H;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double r_squared = 0.0;
};

// Local polynomial coefficients at one anchor: coefficients[0] is the local
// level (equal to the Nadaraya-Watson fit when degree = 0), coefficients[1]
// the local slope used as the derivative estimate.
struct LocalPolyEstimate {
    double anchor = 0.0;
    Eigen::VectorXd coefficients;
    int degree = 0;
};

struct LinearFit {
    double alpha = 0.0;
    Eigen::VectorXd betas;
    double r_squared = 0.0;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
};

// Pointwise band around the kernel fit; lower/upper are set to -inf/+inf at
// grid points where the design density estimate vanishes.
struct ConfidenceBand {
    Eigen::VectorXd x;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

// R^2 = 1 - SSE/SST. Shared by the kernel and the linear fits so the two
// goodness-of-fit numbers are directly comparable; never clamped, so a fit
// worse than the sample mean reports a negative value.
double r_squared(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y);

// Kernel-weighted average of Y at the anchor: mhat_H(x) = (1/n) sum W_Hi(x) Y_i.
double nw_predict(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                  const Eigen::VectorXd& Y, const BandwidthMatrix& H);
double nw_predict(double x, const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h);

KernelFit nw_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                 const BandwidthMatrix& H, unsigned threads = 1);

// Least squares with intercept: Y = alpha + X * betas + residuals.
LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

// Weighted least squares on centered polynomial design rows
// (1, X_i - x, ..., (X_i - x)^p) with Gaussian kernel weights; the solve is
// declared locally singular when the normal-equations condition estimate
// exceeds 1e12.
LocalPolyEstimate local_poly_fit(double x, const Eigen::VectorXd& X,
                                 const Eigen::VectorXd& Y, double h, int degree);

// Degree-1 generalization for several regressors: design rows
// (1, X_i1 - x_1, ..., X_iD - x_D) with product-kernel weights. Returns the
// local level followed by one slope per regressor.
Eigen::VectorXd local_linear_multi(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& Y, const BandwidthMatrix& H);

// Average squared error against a known truth.
double ase(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth);

// Pointwise asymptotic band for the univariate kernel fit,
//   mhat(x) +/- z * sqrt(sigma2(x) * ||K||_2^2 / (n h fhat(x))),
// where sigma2(x) is the kernel-weighted local residual variance and fhat the
// kernel density estimate of the regressor.
ConfidenceBand confidence_band(const Eigen::VectorXd& grid, const Eigen::VectorXd& X,
                               const Eigen::VectorXd& Y, double h, double level);

}  // namespace kreg
