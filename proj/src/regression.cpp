#include "kreg/regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kreg/numeric.hpp"
#include "kreg/parallel.hpp"

namespace kreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConditionLimit = 1e12;  // on the normal equations

// Solves the weighted least squares problem given sqrt-weight-scaled design
// rows. Columns are equilibrated to unit norm first so the condition estimate
// measures genuine rank deficiency, not the scale disparity a tail anchor's
// weight profile induces; singularity is declared when the equilibrated
// normal-equations condition estimate exceeds kConditionLimit.
Eigen::VectorXd solve_weighted_ls(const Eigen::MatrixXd& scaled_design,
                                  const Eigen::VectorXd& scaled_y, double anchor) {
    const Eigen::Index p = scaled_design.cols();
    Eigen::VectorXd column_norms(p);
    Eigen::MatrixXd equilibrated = scaled_design;
    for (Eigen::Index k = 0; k < p; ++k) {
        column_norms[k] = scaled_design.col(k).norm();
        if (!(column_norms[k] > 0.0)) {
            throw LocalSingularityError(
                "local polynomial fit: singular weighted design at anchor " +
                    std::to_string(anchor),
                anchor);
        }
        equilibrated.col(k) /= column_norms[k];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(equilibrated);
    const Eigen::VectorXd r_diag = qr.matrixR().diagonal().cwiseAbs();
    const double r_max = r_diag.maxCoeff();
    const double r_min = r_diag.minCoeff();
    // cond(X^T W X) ~ (r_max / r_min)^2 after equilibration
    if (!(r_min > 0.0) || (r_max / r_min) * (r_max / r_min) > kConditionLimit) {
        throw LocalSingularityError(
            "local polynomial fit: singular weighted design at anchor " +
                std::to_string(anchor),
            anchor);
    }
    return qr.solve(scaled_y).cwiseQuotient(column_norms);
}

}  // namespace

double r_squared(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y) {
    if (fitted.size() != y.size()) throw DomainError("r_squared: length mismatch");
    const double sst = (y.array() - y.mean()).square().sum();
    const double sse = (y - fitted).squaredNorm();
    if (sst <= 0.0) return sse <= 0.0 ? 1.0 : -kInf;
    return 1.0 - sse / sst;
}

double nw_predict(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                  const Eigen::VectorXd& Y, const BandwidthMatrix& H) {
    if (X.rows() != Y.size()) throw DomainError("nw_predict: X and Y lengths differ");
    const WeightVector wv = nw_weights(x, X, H);
    return wv.w.dot(Y) / static_cast<double>(Y.size());
}

double nw_predict(double x, const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h) {
    Eigen::VectorXd anchor(1);
    anchor[0] = x;
    Eigen::MatrixXd Xm(X.size(), 1);
    Xm.col(0) = X;
    return nw_predict(anchor, Xm, Y, BandwidthMatrix::single(h));
}

KernelFit nw_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                 const BandwidthMatrix& H, unsigned threads) {
    const Eigen::Index n = X.rows();
    if (n < 2) throw InsufficientDataError("nw_fit: need at least 2 observations");
    if (n != Y.size()) throw DomainError("nw_fit: X and Y lengths differ");

    Eigen::VectorXd fitted(n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        const Eigen::VectorXd anchor = X.row(static_cast<Eigen::Index>(i)).transpose();
        fitted[static_cast<Eigen::Index>(i)] = nw_predict(anchor, X, Y, H);
    });

    KernelFit fit{H, std::move(fitted), Eigen::VectorXd(), 0.0};
    fit.residuals = Y - fit.fitted;
    fit.r_squared = r_squared(fit.fitted, Y);
    return fit;
}

LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();
    if (n != Y.size()) throw DomainError("ols_fit: X and Y lengths differ");
    if (n <= D + 1) throw InsufficientDataError("ols_fit: need more than D + 1 observations");
    if (!X.allFinite() || !Y.allFinite()) throw DomainError("ols_fit: non-finite input");

    Eigen::MatrixXd design(n, D + 1);
    design.col(0).setOnes();
    design.rightCols(D) = X;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < D + 1) {
        throw SingularDesignError("ols_fit: design matrix is rank deficient");
    }
    const Eigen::VectorXd coef = qr.solve(Y);

    LinearFit fit;
    fit.alpha = coef[0];
    fit.betas = coef.tail(D);
    fit.fitted = design * coef;
    fit.residuals = Y - fit.fitted;
    fit.r_squared = r_squared(fit.fitted, Y);
    return fit;
}

LocalPolyEstimate local_poly_fit(double x, const Eigen::VectorXd& X,
                                 const Eigen::VectorXd& Y, double h, int degree) {
    const Eigen::Index n = X.size();
    if (degree < 0) throw DomainError("local_poly_fit: negative degree");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("local_poly_fit: h must be positive");
    if (n != Y.size()) throw DomainError("local_poly_fit: X and Y lengths differ");
    const Eigen::Index p = degree + 1;
    if (n < p) {
        throw LocalSingularityError("local_poly_fit: fewer observations than coefficients", x);
    }

    // The WLS solution is invariant to scaling the weights, so work with
    // exp(e_i - e_max): the nearest observation always has weight one and
    // distant ones fade without underflowing the whole system.
    const Eigen::ArrayXd u = (X.array() - x) / h;
    const Eigen::ArrayXd exponents = -0.5 * u.square();
    const Eigen::ArrayXd sqrt_w = (0.5 * (exponents - exponents.maxCoeff())).exp();

    Eigen::MatrixXd design(n, p);
    const Eigen::ArrayXd centered = X.array() - x;
    design.col(0) = sqrt_w.matrix();
    for (Eigen::Index k = 1; k < p; ++k) {
        design.col(k) = design.col(k - 1).array() * centered;
    }
    const Eigen::VectorXd scaled_y = (sqrt_w * Y.array()).matrix();

    LocalPolyEstimate est;
    est.anchor = x;
    est.degree = degree;
    est.coefficients = solve_weighted_ls(design, scaled_y, x);
    return est;
}

Eigen::VectorXd local_linear_multi(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& Y, const BandwidthMatrix& H) {
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();
    if (x.size() != D || static_cast<std::size_t>(D) != H.dim()) {
        throw DomainError("local_linear_multi: dimension mismatch");
    }
    if (n != Y.size()) throw DomainError("local_linear_multi: X and Y lengths differ");
    if (n < D + 1) {
        throw LocalSingularityError("local_linear_multi: fewer observations than coefficients",
                                    x[0]);
    }

    Eigen::ArrayXd exponents(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < D; ++d) {
            const double u = (x[d] - X(i, d)) / H[static_cast<std::size_t>(d)];
            s += u * u;
        }
        exponents[i] = -0.5 * s;
    }
    const Eigen::ArrayXd sqrt_w = (0.5 * (exponents - exponents.maxCoeff())).exp();

    Eigen::MatrixXd design(n, D + 1);
    design.col(0) = sqrt_w.matrix();
    for (Eigen::Index d = 0; d < D; ++d) {
        design.col(d + 1) = (sqrt_w * (X.col(d).array() - x[d])).matrix();
    }
    const Eigen::VectorXd scaled_y = (sqrt_w * Y.array()).matrix();
    return solve_weighted_ls(design, scaled_y, x[0]);
}

double ase(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth) {
    if (fitted.size() != truth.size()) throw DomainError("ase: length mismatch");
    if (fitted.size() == 0) throw DomainError("ase: empty input");
    return (fitted - truth).squaredNorm() / static_cast<double>(fitted.size());
}

ConfidenceBand confidence_band(const Eigen::VectorXd& grid, const Eigen::VectorXd& X,
                               const Eigen::VectorXd& Y, double h, double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence_band: level outside (0,1)");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("confidence_band: h must be positive");
    const Eigen::Index n = X.size();
    if (n < 2) throw InsufficientDataError("confidence_band: need at least 2 observations");
    const double x_min = X.minCoeff();
    const double x_max = X.maxCoeff();
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        if (grid[g] < x_min || grid[g] > x_max) {
            throw DomainError("confidence_band: grid point outside the data range");
        }
    }

    Eigen::MatrixXd Xm(n, 1);
    Xm.col(0) = X;
    const BandwidthMatrix H = BandwidthMatrix::single(h);
    const KernelFit fit = nw_fit(Xm, Y, H);
    const Eigen::ArrayXd squared_residuals = fit.residuals.array().square();

    // z for a two-sided band; computed from the lower tail to keep precision.
    const double z = -normal_quantile((1.0 - level) / 2.0);

    ConfidenceBand band;
    band.x = grid;
    band.lower.resize(grid.size());
    band.upper.resize(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const Eigen::ArrayXd u = (grid[g] - X.array()) / h;
        const Eigen::ArrayXd kernels = kInvSqrt2Pi * (-0.5 * u.square()).exp();
        const double kernel_sum = kernels.sum();
        const double density = kernel_sum / (static_cast<double>(n) * h);
        if (density < 1e-12) {
            band.lower[g] = -kInf;
            band.upper[g] = kInf;
            continue;
        }
        const double center = (kernels * Y.array()).sum() / kernel_sum;
        const double local_variance = (kernels * squared_residuals).sum() / kernel_sum;
        const double half_width =
            z * std::sqrt(local_variance * kGaussianL2Norm /
                          (static_cast<double>(n) * h * density));
        band.lower[g] = center - half_width;
        band.upper[g] = center + half_width;
    }
    return band;
}

}  // namespace kreg
