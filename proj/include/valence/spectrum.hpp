#pragma once

#include <span>
#include <vector>

namespace valence {

/// One-sided power spectral density; power[i] is in (signal unit)^2 / Hz.
struct Psd {
  std::vector<double> freq;
  std::vector<double> power;
  double df = 0.0;
};

enum class Detrend { kNone, kConstant, kLinear };

std::vector<double> hann_window(size_t n);

/// Subtracts the least-squares line through (i, x[i]).
std::vector<double> linear_detrend(std::span<const double> x);

/// Single-segment Hann periodogram.
Psd periodogram(std::span<const double> x, double rate_hz, Detrend detrend);

struct WelchOptions {
  double segment_s = 2.0;
  double overlap = 0.5;
};

/// Hann-windowed Welch average with per-segment mean removal. A signal shorter
/// than one segment is treated as a single segment.
Psd welch(std::span<const double> x, double rate_hz, const WelchOptions& options = {});

/// Riemann sum of power * df over bins with lo <= f < hi (exactly additive
/// across adjacent bands).
double band_sum(const Psd& psd, double lo_hz, double hi_hz);

/// Trapezoidal integral over the consecutive bins with lo <= f < hi.
double band_trapezoid(const Psd& psd, double lo_hz, double hi_hz);

}  // namespace valence
