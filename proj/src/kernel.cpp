#include "kreg/kernel.hpp"

#include <cmath>

#include "kreg/numeric.hpp"

namespace kreg {

BandwidthMatrix::BandwidthMatrix(std::vector<double> diag) : diag_(std::move(diag)) {
    if (diag_.empty()) throw DomainError("BandwidthMatrix: empty diagonal");
    for (std::size_t d = 0; d < diag_.size(); ++d) {
        if (!(diag_[d] > 0.0) || !std::isfinite(diag_[d])) {
            throw DomainError("BandwidthMatrix: bandwidth " + std::to_string(d) +
                              " must be positive and finite");
        }
    }
}

double gaussian_kernel(double u) {
    if (!std::isfinite(u)) throw DomainError("gaussian_kernel: non-finite argument");
    return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

double product_kernel(const Eigen::VectorXd& u) {
    if (u.size() == 0) throw DomainError("product_kernel: empty argument");
    double k = 1.0;
    for (Eigen::Index d = 0; d < u.size(); ++d) k *= gaussian_kernel(u[d]);
    return k;
}

namespace detail {

Eigen::VectorXd normalize_from_exponents(const Eigen::VectorXd& exponents,
                                         double max_abs_u) {
    const Eigen::Index n = exponents.size();
    const double e_max = exponents.maxCoeff();
    if (e_max < kLogWeightFloor) {
        throw EmptyNeighborhoodError(
            "nw_weights: anchor too far from every observation at this bandwidth");
    }

    Eigen::VectorXd w;
    double denom = 0.0;
    if (max_abs_u <= kLogSpaceTrigger) {
        w = exponents.array().exp();
        denom = w.sum();
    }
    if (denom <= 0.0) {
        // Log-space path: shift exponents so the largest weight is exactly 1.
        w = (exponents.array() - e_max).exp();
        denom = w.sum();
    }
    w *= static_cast<double>(n) / denom;  // (1/n) * sum w_i = 1
    return w;
}

}  // namespace detail

WeightVector nw_weights(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                        const BandwidthMatrix& H) {
    const Eigen::Index n = X.rows();
    const Eigen::Index D = X.cols();
    if (n < 1) throw DomainError("nw_weights: no observations");
    if (x.size() != D || static_cast<std::size_t>(D) != H.dim()) {
        throw DomainError("nw_weights: dimension mismatch between anchor, data and bandwidth");
    }
    if (!x.allFinite() || !X.allFinite()) {
        throw DomainError("nw_weights: non-finite input");
    }

    Eigen::VectorXd exponents(n);
    double max_abs_u = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < D; ++d) {
            const double u = (x[d] - X(i, d)) / H[static_cast<std::size_t>(d)];
            max_abs_u = std::max(max_abs_u, std::abs(u));
            s += u * u;
        }
        exponents[i] = -0.5 * s;
    }
    return WeightVector{detail::normalize_from_exponents(exponents, max_abs_u), x};
}

WeightVector nw_weights(double x, const Eigen::VectorXd& X, double h) {
    Eigen::VectorXd anchor(1);
    anchor[0] = x;
    Eigen::MatrixXd Xm(X.size(), 1);
    Xm.col(0) = X;
    return nw_weights(anchor, Xm, BandwidthMatrix::single(h));
}

}  // namespace kreg
