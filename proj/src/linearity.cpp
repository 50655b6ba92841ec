#include "kreg/linearity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kreg/parallel.hpp"
#include "kreg/rng.hpp"

namespace kreg {

namespace {

// Multiplier streams attach to observations through their lexicographic
// (X row, Y) rank, not their position, so reordering the sample reorders the
// draws with it and the test is invariant to permutations of the input.
std::vector<std::uint64_t> observation_ranks(const Eigen::MatrixXd& X,
                                             const Eigen::VectorXd& Y) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Eigen::Index ia = static_cast<Eigen::Index>(a);
        const Eigen::Index ib = static_cast<Eigen::Index>(b);
        for (Eigen::Index d = 0; d < X.cols(); ++d) {
            if (X(ia, d) != X(ib, d)) return X(ia, d) < X(ib, d);
        }
        return Y[ia] < Y[ib];
    });
    std::vector<std::uint64_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<std::uint64_t>(k);
    return rank;
}

}  // namespace

namespace detail {

Eigen::MatrixXd nw_smoother_matrix(const Eigen::MatrixXd& X, const BandwidthMatrix& H) {
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();
    if (static_cast<std::size_t>(D) != H.dim()) {
        throw DomainError("nw_smoother_matrix: bandwidth dimension mismatch");
    }
    Eigen::MatrixXd S(n, n);
    Eigen::VectorXd exponents(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index d = 0; d < D; ++d) {
                const double u = (X(i, d) - X(j, d)) / H[static_cast<std::size_t>(d)];
                s += u * u;
            }
            exponents[j] = -0.5 * s;
        }
        // The diagonal exponent is zero, so the row sum is at least one and
        // never underflows.
        const Eigen::VectorXd kernels = exponents.array().exp();
        S.row(i) = kernels.transpose() / kernels.sum();
    }
    return S;
}

double wild_weight(WildWeights kind, std::uint64_t seed, std::uint64_t replication,
                   std::uint64_t observation) {
    const double u = rng::uniform(seed, replication, observation);
    if (kind == WildWeights::Rademacher) return u < 0.5 ? -1.0 : 1.0;
    // Two-point draw: value (1-sqrt(5))/2 with probability (5+sqrt(5))/10.
    constexpr double kLow = -0.6180339887498949;
    constexpr double kHigh = 1.618033988749895;
    constexpr double kLowProbability = 0.7236067977499789;
    return u < kLowProbability ? kLow : kHigh;
}

}  // namespace detail

Eigen::VectorXd smoothed_parametric_fit(const Eigen::MatrixXd& X, const BandwidthMatrix& H,
                                        const LinearFit& theta_fit) {
    if (theta_fit.fitted.size() != X.rows()) {
        throw DomainError("smoothed_parametric_fit: fit does not match the sample");
    }
    return detail::nw_smoother_matrix(X, H) * theta_fit.fitted;
}

double t_statistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                   const BandwidthMatrix& H) {
    const LinearFit theta_fit = ols_fit(X, Y);
    const Eigen::MatrixXd S = detail::nw_smoother_matrix(X, H);
    // S Y - S m_theta = S (Y - m_theta); the difference cancels before
    // smoothing, which keeps exactly-linear responses at machine zero.
    return (S * theta_fit.residuals).squaredNorm();
}

LinearityTestResult wild_bootstrap_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                        const BandwidthMatrix& H,
                                        const WildBootstrapConfig& config) {
    if (config.replications < 1) {
        throw DomainError("wild_bootstrap_test: need at least one replication");
    }
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();

    const LinearFit theta_fit = ols_fit(X, Y);
    const Eigen::MatrixXd S = detail::nw_smoother_matrix(X, H);

    // Statistics below this level are rounding noise from the smoother and
    // the projection; snapping them to zero keeps the count comparison
    // deterministic when the null holds exactly.
    const double gap_floor = 1e-11 * std::max(1.0, Y.cwiseAbs().maxCoeff());
    const double t_floor = static_cast<double>(n) * gap_floor * gap_floor;
    auto snapped = [t_floor](double t) { return t < t_floor ? 0.0 : t; };

    const double t_observed = snapped((S * theta_fit.residuals).squaredNorm());

    // The design and its factorization are shared by every replication; only
    // the response changes.
    Eigen::MatrixXd design(n, D + 1);
    design.col(0).setOnes();
    design.rightCols(D) = X;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);

    const std::vector<std::uint64_t> ranks = observation_ranks(X, Y);
    const std::size_t B = static_cast<std::size_t>(config.replications);
    std::vector<double> statistics(B);
    parallel_for(B, config.threads, [&](std::size_t b) {
        Eigen::VectorXd y_boot(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = detail::wild_weight(config.weights, config.seed,
                                                 static_cast<std::uint64_t>(b),
                                                 ranks[static_cast<std::size_t>(i)]);
            y_boot[i] = theta_fit.fitted[i] + theta_fit.residuals[i] * v;
        }
        const Eigen::VectorXd residual_boot = y_boot - design * qr.solve(y_boot);
        statistics[b] = snapped((S * residual_boot).squaredNorm());
    });

    LinearityTestResult result;
    result.t_observed = t_observed;
    result.seed = config.seed;
    result.bootstrap_t.reserve(B);
    std::size_t invalid = 0;
    for (double t : statistics) {
        if (std::isfinite(t)) {
            result.bootstrap_t.push_back(t);
        } else {
            ++invalid;
        }
    }
    if (invalid * 20 > B) {  // more than 5% unusable replications
        throw Error("wild_bootstrap_test: " + std::to_string(invalid) + " of " +
                    std::to_string(B) + " replications failed");
    }

    result.B = static_cast<int>(result.bootstrap_t.size());
    std::size_t count = 0;
    for (double t : result.bootstrap_t) {
        if (t >= t_observed) ++count;
    }
    if (config.plus_one_correction) {
        result.p_value = (1.0 + static_cast<double>(count)) /
                         (static_cast<double>(result.B) + 1.0);
    } else {
        result.p_value = static_cast<double>(count) / static_cast<double>(result.B);
    }
    return result;
}

}  // namespace kreg
