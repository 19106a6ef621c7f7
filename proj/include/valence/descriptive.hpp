#pragma once

#include <span>
#include <vector>

// Small descriptive statistics shared by every module. Sample statistics use
// the n-1 denominator; the population variants are named explicitly.
namespace valence {

double mean(std::span<const double> v);
double median(std::span<const double> v);
double sample_variance(std::span<const double> v);
double sample_sd(std::span<const double> v);
double population_variance(std::span<const double> v);

/// Unscaled median absolute deviation from the median.
double mad(std::span<const double> v);

/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::span<const double> v, double q);

inline constexpr double kMadScale = 1.4826;

}  // namespace valence
