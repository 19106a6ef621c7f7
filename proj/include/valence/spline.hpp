#pragma once

#include <span>
#include <vector>

namespace valence {

// Natural cubic spline through strictly increasing knots. Outside the knot
// range it continues linearly with the end slope (the C2 continuation of a
// natural spline).
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double t) const;

  /// Evaluates at ascending query points in a single sweep.
  std::vector<double> evaluate_sorted(std::span<const double> t) const;

 private:
  double eval_segment(size_t i, double t) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace valence
