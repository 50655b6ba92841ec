#include "kreg/semiparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kreg/numeric.hpp"
#include "kreg/parallel.hpp"
#include "kreg/regression.hpp"

namespace kreg {

namespace {

std::string join_indices(const std::vector<std::size_t>& indices, std::size_t limit = 8) {
    std::string out;
    for (std::size_t k = 0; k < indices.size() && k < limit; ++k) {
        if (k > 0) out += ", ";
        out += std::to_string(indices[k]);
    }
    if (indices.size() > limit) out += ", ...";
    return out;
}

}  // namespace

SemiParamMeasures semi_params(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                              const BandwidthMatrix& H, unsigned threads) {
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();
    if (n != Y.size()) throw DomainError("semi_params: X and Y lengths differ");
    if (static_cast<std::size_t>(D) != H.dim()) {
        throw DomainError("semi_params: bandwidth dimension mismatch");
    }

    SemiParamMeasures out;
    out.per_point_slopes.resize(n, D);
    std::vector<unsigned char> singular(static_cast<std::size_t>(n), 0);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        const Eigen::Index row = static_cast<Eigen::Index>(i);
        try {
            const Eigen::VectorXd coef =
                local_linear_multi(X.row(row).transpose(), X, Y, H);
            out.per_point_slopes.row(row) = coef.tail(D).transpose();
        } catch (const LocalSingularityError&) {
            singular[i] = 1;
        }
    });

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < singular.size(); ++i) {
        if (singular[i]) bad.push_back(i);
    }
    if (!bad.empty()) {
        throw LocalSingularityError("semi_params: singular local design at anchors [" +
                                    join_indices(bad) + "]");
    }

    // Fixed pairwise reduction keeps the averages bit-identical for any
    // thread count.
    out.loadings.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) {
        const Eigen::VectorXd column = out.per_point_slopes.col(d);
        out.loadings[d] = pairwise_mean({column.data(), static_cast<std::size_t>(n)});
    }
    out.per_point_alphas = Y - X * out.loadings;
    out.alpha_star =
        pairwise_mean({out.per_point_alphas.data(), static_cast<std::size_t>(n)});
    return out;
}

SemiBeta semi_beta(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                   unsigned threads) {
    Eigen::MatrixXd Xm(X.size(), 1);
    Xm.col(0) = X;
    SemiParamMeasures measures = semi_params(Xm, Y, BandwidthMatrix::single(h), threads);
    return SemiBeta{measures.loadings[0], measures.per_point_slopes.col(0)};
}

SemiAlpha semi_alpha(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double beta_star) {
    if (X.size() != Y.size()) throw DomainError("semi_alpha: X and Y lengths differ");
    if (!std::isfinite(beta_star)) throw DomainError("semi_alpha: non-finite beta_star");
    SemiAlpha out;
    out.per_point_alphas = Y - beta_star * X;
    out.alpha_star = pairwise_mean(
        {out.per_point_alphas.data(), static_cast<std::size_t>(out.per_point_alphas.size())});
    return out;
}

Eigen::VectorXd beta_curve(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                           const Eigen::VectorXd& grid) {
    Eigen::VectorXd slopes(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        try {
            slopes[g] = local_poly_fit(grid[g], X, Y, h, 1).coefficients[1];
        } catch (const LocalSingularityError&) {
            slopes[g] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return slopes;
}

Eigen::VectorXd alpha_curve(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                            double beta_star, const Eigen::VectorXd& grid) {
    if (!std::isfinite(beta_star)) throw DomainError("alpha_curve: non-finite beta_star");
    // Kernel smoothing of the per-point abnormal returns Y_i - beta* X_i:
    // exactly flat at the intercept for exactly-linear data, and its sample
    // average is the alpha_star measure.
    const Eigen::VectorXd abnormal = Y - beta_star * X;
    Eigen::VectorXd alphas(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        try {
            alphas[g] = nw_predict(grid[g], X, abnormal, h);
        } catch (const EmptyNeighborhoodError&) {
            alphas[g] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return alphas;
}

SemiParamMeasures ff3_semi_params(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                  const BandwidthMatrix& H, unsigned threads) {
    if (X.cols() != 3) throw DomainError("ff3_semi_params: expected 3 factor columns");
    if (X.rows() <= 10) throw InsufficientDataError("ff3_semi_params: need more than 10 rows");
    return semi_params(X, Y, H, threads);
}

Eigen::VectorXd default_grid(const Eigen::VectorXd& X, int points) {
    if (points < 0) throw DomainError("default_grid: negative size");
    if (points == 0) return Eigen::VectorXd();
    if (X.size() < 2) throw InsufficientDataError("default_grid: need at least 2 observations");

    std::vector<double> sorted(X.data(), X.data() + X.size());
    std::sort(sorted.begin(), sorted.end());
    const double lo = quantile_sorted(sorted, 0.005);
    const double hi = quantile_sorted(sorted, 0.995);
    if (!(hi > lo)) throw DegenerateSampleError("default_grid: regressor has no spread");
    if (points == 1) {
        Eigen::VectorXd one(1);
        one[0] = 0.5 * (lo + hi);
        return one;
    }
    return Eigen::VectorXd::LinSpaced(points, lo, hi);
}

}  // namespace kreg
