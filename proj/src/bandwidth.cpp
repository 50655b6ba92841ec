#include "kreg/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kreg/numeric.hpp"
#include "kreg/simplex.hpp"

namespace kreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// CV evaluation against a precomputed pairwise difference matrix, the hot
// path of the bandwidth search. The residual Y_i - mhat(X_i) is accumulated
// as sum_j k_ij (Y_i - Y_j) / sum_j k_ij so a constant response cancels
// exactly at any bandwidth.
double cv_score_with_diffs(const Eigen::MatrixXd& diffs, const Eigen::VectorXd& Y,
                           double h) {
    const Eigen::Index n = Y.size();
    const Eigen::ArrayXXd kernels = (-0.5 * (diffs.array() / h).square()).exp();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = kernels.row(i).sum();  // >= 1: own kernel value is 1
        const double gap_sum = (kernels.row(i) * (Y[i] - Y.transpose().array())).sum();
        const double residual = gap_sum / denom;
        const double leverage = kernels(i, i) / denom;  // W_hi(X_i)/n
        const double penalty_base = 1.0 - leverage;
        if (penalty_base <= 1e-12) {
            // A point carrying all of its own weight signals h too small,
            // unless its residual vanishes identically.
            if (residual == 0.0) continue;
            return kInf;
        }
        const double ratio = residual / penalty_base;
        acc += ratio * ratio;
    }
    return acc / static_cast<double>(n);
}

Eigen::MatrixXd pairwise_diffs(const Eigen::VectorXd& X) {
    const Eigen::Index n = X.size();
    Eigen::MatrixXd diffs(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        diffs.row(i) = (X.array() - X[i]).transpose();
    }
    return diffs;
}

void validate_xy(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) {
    if (X.size() != Y.size()) throw DomainError("bandwidth: X and Y lengths differ");
    if (!X.allFinite() || !Y.allFinite()) throw DomainError("bandwidth: non-finite input");
}

}  // namespace

double silverman_rot(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    if (n < 5) throw InsufficientDataError("silverman_rot: need at least 5 observations");
    if (!x.allFinite()) throw DomainError("silverman_rot: non-finite input");

    const double mean = x.mean();
    const double variance = (x.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(variance);

    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q3 = quantile_sorted(sorted, 0.75);
    const double iqr_term = (q3 - q1) / 1.34;

    double spread;
    if (sd > 0.0 && iqr_term > 0.0) {
        spread = std::min(sd, iqr_term);
    } else if (sd > 0.0 || iqr_term > 0.0) {
        spread = std::max(sd, iqr_term);  // one spread measure collapsed
    } else {
        throw DegenerateSampleError("silverman_rot: sample has zero spread");
    }
    return 1.06 * spread * std::pow(static_cast<double>(n), -0.2);
}

CvScore cv_score(double h, const Eigen::VectorXd& X, const Eigen::VectorXd& Y) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("cv_score: h must be positive");
    if (X.size() < 2) throw InsufficientDataError("cv_score: need at least 2 observations");
    validate_xy(X, Y);
    return CvScore{h, cv_score_with_diffs(pairwise_diffs(X), Y, h)};
}

BandwidthResult optimize_bandwidth(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                   const BandwidthSearchConfig& config) {
    validate_xy(X, Y);
    if (config.max_iterations < 1 || !(config.x_tolerance > 0.0) ||
        !(config.f_tolerance > 0.0)) {
        throw DomainError("optimize_bandwidth: invalid search configuration");
    }
    const double h0 = silverman_rot(X);
    const Eigen::MatrixXd diffs = pairwise_diffs(X);

    BandwidthResult best;
    best.h = h0;
    best.score = cv_score_with_diffs(diffs, Y, h0);

    // Whether searching log h (default) or h itself, track the best bandwidth
    // over every evaluation so the result can never regress below the start.
    auto objective = [&](const Eigen::VectorXd& p) {
        const double h = config.log_domain ? std::exp(p[0]) : p[0];
        if (!(h > 0.0) || !std::isfinite(h)) return kInf;
        const double score = cv_score_with_diffs(diffs, Y, h);
        if (score < best.score) {
            best.h = h;
            best.score = score;
        }
        return score;
    };

    Eigen::VectorXd start(1);
    start[0] = config.log_domain ? std::log(h0) : h0;

    NelderMeadOptions nm;
    nm.max_iterations = config.max_iterations;
    nm.x_tolerance = config.x_tolerance;
    nm.f_tolerance = config.f_tolerance;
    nm.initial_step = 0.25;

    // Flat objective across the initial simplex: keep the starting value.
    Eigen::VectorXd second = start;
    second[0] += nm.initial_step;
    const double f_start = objective(start);
    const double f_second = objective(second);
    if (std::isfinite(f_start) && std::isfinite(f_second) &&
        std::abs(f_start - f_second) <= nm.f_tolerance * std::max(1.0, std::abs(f_start))) {
        return BandwidthResult{h0, f_start, true, 0};
    }

    const NelderMeadResult nmres = nelder_mead(objective, start, nm);
    best.converged = nmres.converged;
    best.iterations = nmres.iterations;
    return best;
}

BandwidthMatrixResult optimize_bandwidth_matrix(const Eigen::MatrixXd& X,
                                                const Eigen::VectorXd& Y,
                                                const BandwidthSearchConfig& config) {
    const Eigen::Index D = X.cols();
    if (D < 1) throw DomainError("optimize_bandwidth_matrix: no regressor columns");

    std::vector<double> diag;
    std::vector<BandwidthResult> per_column;
    diag.reserve(static_cast<std::size_t>(D));
    per_column.reserve(static_cast<std::size_t>(D));
    for (Eigen::Index d = 0; d < D; ++d) {
        const std::string where = "optimize_bandwidth_matrix: column " + std::to_string(d) + ": ";
        try {
            BandwidthResult r = optimize_bandwidth(X.col(d), Y, config);
            diag.push_back(r.h);
            per_column.push_back(std::move(r));
        } catch (const DegenerateSampleError& e) {
            throw DegenerateSampleError(where + e.what());
        } catch (const InsufficientDataError& e) {
            throw InsufficientDataError(where + e.what());
        } catch (const Error& e) {
            throw DomainError(where + e.what());
        }
    }
    return BandwidthMatrixResult{BandwidthMatrix(std::move(diag)), std::move(per_column)};
}

}  // namespace kreg
