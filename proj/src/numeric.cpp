#include "kreg/numeric.hpp"

#include <algorithm>
#include <limits>

namespace kreg {

namespace {

double pairwise_sum_impl(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

double pairwise_mean(std::span<const double> values) {
    if (values.empty()) throw DomainError("pairwise_mean: empty input");
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile_sorted: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile_sorted: q outside [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865476);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p outside (0,1)");
    // Work in the lower tail; reflect at the end.
    const bool upper = p > 0.5;
    const double pl = upper ? 1.0 - p : p;

    // Abramowitz-Stegun 26.2.22 rational start (|err| < 4.5e-4).
    const double t = std::sqrt(-2.0 * std::log(pl));
    double x = -(t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t)));

    // Newton on Phi(x) - pl with analytic density.
    for (int iter = 0; iter < 8; ++iter) {
        const double err = normal_cdf(x) - pl;
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        if (pdf <= 0.0) break;
        const double dx = err / pdf;
        x -= dx;
        if (std::abs(dx) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    return upper ? -x : x;
}

}  // namespace kreg
