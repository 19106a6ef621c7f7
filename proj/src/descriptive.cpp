#include "valence/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valence/error.hpp"

namespace valence {

double mean(std::span<const double> v) {
  require(!v.empty(), "mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::span<const double> v) {
  require(!v.empty(), "median of empty sample");
  std::vector<double> s(v.begin(), v.end());
  const size_t mid = s.size() / 2;
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid), s.end());
  if (s.size() % 2 == 1) return s[mid];
  const double upper = s[mid];
  const double lower = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

double sum_sq_dev(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc;
}

}  // namespace

double sample_variance(std::span<const double> v) {
  require(v.size() >= 2, "sample variance needs at least two values");
  return sum_sq_dev(v) / static_cast<double>(v.size() - 1);
}

double sample_sd(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

double population_variance(std::span<const double> v) {
  return sum_sq_dev(v) / static_cast<double>(v.size());
}

double mad(std::span<const double> v) {
  const double med = median(v);
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [med](double x) { return std::abs(x - med); });
  return median(dev);
}

double quantile(std::span<const double> v, double q) {
  require(!v.empty(), "quantile of empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile level outside [0, 1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

}  // namespace valence
