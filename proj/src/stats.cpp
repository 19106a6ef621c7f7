#include "valence/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "valence/error.hpp"

namespace valence::stats {

namespace {

constexpr size_t kExactLimit = 20;

struct Ranked {
  std::vector<double> ranks;  // midranks, in input order (x first, then y)
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
  bool has_ties = false;
};

Ranked midranks(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size() + y.size();
  std::vector<std::pair<double, size_t>> all;
  all.reserve(n);
  for (size_t i = 0; i < x.size(); ++i) all.emplace_back(x[i], i);
  for (size_t i = 0; i < y.size(); ++i) all.emplace_back(y[i], x.size() + i);
  std::sort(all.begin(), all.end());

  Ranked r;
  r.ranks.resize(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && all[j + 1].first == all[i].first) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) r.ranks[all[k].second] = rank;
    const auto t = static_cast<double>(j - i + 1);
    if (j > i) {
      r.has_ties = true;
      r.tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  return r;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double mann_whitney_ux(std::span<const double> x, std::span<const double> y) {
  double u = 0.0;
  for (double a : x) {
    for (double b : y) {
      if (a > b) u += 1.0;
      else if (a == b) u += 0.5;
    }
  }
  return u;
}

double mann_whitney_exact_cdf(double u, size_t n1, size_t n2) {
  // counts[a][b][s]: assignments of a x-values and b y-values with U = s.
  // Built incrementally over b with a rolling table keyed by a.
  const size_t max_u = n1 * n2;
  std::vector<std::vector<std::vector<double>>> f(
      n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(max_u + 1, 0.0)));
  for (size_t a = 0; a <= n1; ++a) f[a][0][0] = 1.0;
  for (size_t b = 0; b <= n2; ++b) f[0][b][0] = 1.0;
  for (size_t a = 1; a <= n1; ++a) {
    for (size_t b = 1; b <= n2; ++b) {
      for (size_t s = 0; s <= a * b; ++s) {
        // Largest value belongs to x (contributes b to U) or to y (contributes 0).
        const double from_x = s >= b ? f[a - 1][b][s - b] : 0.0;
        f[a][b][s] = from_x + f[a][b - 1][s];
      }
    }
  }
  double total = 0.0;
  double below = 0.0;
  for (size_t s = 0; s <= max_u; ++s) {
    total += f[n1][n2][s];
    if (static_cast<double>(s) <= u + 1e-9) below += f[n1][n2][s];
  }
  return below / total;
}

TestResult mann_whitney(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) fail(ErrorCode::kInvalidArgument, "Mann-Whitney needs two non-empty samples");
  const size_t n1 = x.size();
  const size_t n2 = y.size();
  const Ranked r = midranks(x, y);
  double rank_sum_x = 0.0;
  for (size_t i = 0; i < n1; ++i) rank_sum_x += r.ranks[i];
  const double ux = rank_sum_x - static_cast<double>(n1 * (n1 + 1)) / 2.0;
  const double uy = static_cast<double>(n1 * n2) - ux;

  TestResult out;
  out.statistic = std::min(ux, uy);
  out.n1 = n1;
  out.n2 = n2;
  if (n1 + n2 <= kExactLimit && !r.has_ties) {
    out.method = "exact";
    out.p = std::min(1.0, 2.0 * mann_whitney_exact_cdf(out.statistic, n1, n2));
    return out;
  }

  out.method = "normal";
  const auto n = static_cast<double>(n1 + n2);
  const double mu = static_cast<double>(n1 * n2) / 2.0;
  const double var =
      static_cast<double>(n1 * n2) / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    out.p = 1.0;
    return out;
  }
  const double z = std::max(0.0, std::abs(out.statistic - mu) - 0.5) / std::sqrt(var);
  out.p = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double k = 2.0 * j - 1.0;
      sum += std::exp(-k * k * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_normal_test(std::span<const double> x) {
  if (x.size() < 3) fail(ErrorCode::kTooShort, "KS test needs at least three values");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double cdf = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  TestResult out;
  out.statistic = d;
  out.n1 = s.size();
  out.method = "ks-asymptotic";
  const double sqrt_n = std::sqrt(n);
  out.p = kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
  return out;
}

}  // namespace valence::stats
