#include "valence/spline.hpp"

#include <algorithm>

#include "valence/error.hpp"

namespace valence {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
  require(x.size() == y.size(), "spline knots and values differ in length");
  require(x.size() >= 2, "spline needs at least two knots");
  for (size_t i = 1; i < x_.size(); ++i) {
    require(x_[i] > x_[i - 1], "spline knots must be strictly increasing");
  }
  const size_t n = x_.size();
  if (n == 2) return;

  // Thomas algorithm on the interior second-derivative system.
  const size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (size_t i = 1; i < k; ++i) {
    const double lower = x_[i + 1] - x_[i];  // h_{i} on the sub-diagonal
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (size_t i = k - 1; i-- > 0;) {
    m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
  }
}

double CubicSpline::eval_segment(size_t i, double t) const {
  const double h = x_[i + 1] - x_[i];
  if (t < x_.front() || t > x_.back()) {
    // Linear continuation from the nearest end.
    const bool left = t < x_.front();
    const size_t e = left ? 0 : x_.size() - 1;
    const double slope =
        left ? (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0
             : (y_[e] - y_[e - 1]) / h + h * (m_[e - 1] + 2.0 * m_[e]) / 6.0;
    return y_[e] + slope * (t - x_[e]);
  }
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::operator()(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  size_t i = it == x_.begin() ? 0 : static_cast<size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  return eval_segment(i, t);
}

std::vector<double> CubicSpline::evaluate_sorted(std::span<const double> t) const {
  std::vector<double> out(t.size());
  size_t i = 0;
  for (size_t j = 0; j < t.size(); ++j) {
    while (i + 2 < x_.size() && t[j] >= x_[i + 1]) ++i;
    out[j] = eval_segment(i, t[j]);
  }
  return out;
}

}  // namespace valence
