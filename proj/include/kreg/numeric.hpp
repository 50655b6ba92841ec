#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "kreg/errors.hpp"

namespace kreg {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // (2*pi)^(-1/2)
inline constexpr double kGaussianL2Norm = 0.28209479177387814;  // Int K(u)^2 du = 1/(2*sqrt(pi))

// Pairwise (cascade) summation. Gives a fixed reduction order independent of
// how the values were produced, so parallel per-element maps reduce to the
// same bits on every run.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

// Linear-interpolation quantile of a sorted sample (the common "type 7"
// convention): position q*(n-1) between order statistics.
double quantile_sorted(std::span<const double> sorted, double q);

// Standard normal CDF, Phi(x) = erfc(-x/sqrt(2))/2.
double normal_cdf(double x);

// Inverse standard normal CDF. Rational initial guess polished by Newton
// steps on normal_cdf; accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

}  // namespace kreg
