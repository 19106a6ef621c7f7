#pragma once

#include <span>
#include <string>

namespace valence::stats {

struct TestResult {
  double statistic = 0.0;
  double p = 1.0;
  size_t n1 = 0;
  size_t n2 = 0;
  std::string method;
};

double normal_cdf(double z);

/// Two-sided Mann-Whitney U. statistic = min(U_x, U_y). Exact null
/// distribution when n1 + n2 <= 20 without ties, otherwise the normal
/// approximation with tie and continuity corrections.
TestResult mann_whitney(std::span<const double> x, std::span<const double> y);

/// U_x = #{x > y} + 0.5 #{x = y} over all pairs.
double mann_whitney_ux(std::span<const double> x, std::span<const double> y);

/// P(U <= u) under H0 for tie-free samples, by counting rank assignments.
double mann_whitney_exact_cdf(double u, size_t n1, size_t n2);

/// One-sample Kolmogorov-Smirnov against the standard normal. p from the
/// asymptotic Kolmogorov distribution with Stephens' small-n correction.
TestResult ks_normal_test(std::span<const double> x);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_q(double lambda);

}  // namespace valence::stats
