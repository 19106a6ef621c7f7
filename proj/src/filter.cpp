#include "valence/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "valence/error.hpp"

namespace valence {

namespace {

enum class Kind { kLow, kHigh };

SosFilter design(Kind kind, int order, double cutoff_hz, double rate_hz) {
  require(order >= 1, "filter order must be positive");
  require(rate_hz > 0.0, "sampling rate must be positive");
  require(cutoff_hz > 0.0 && cutoff_hz < rate_hz / 2.0,
          "cutoff must lie strictly between 0 and the Nyquist frequency");
  const double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  SosFilter sos;
  for (int i = 0; i < order / 2; ++i) {
    const double q =
        1.0 / (2.0 * std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s{};
    if (kind == Kind::kLow) {
      s.b0 = k * k * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    sos.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s{};
    const double norm = 1.0 / (k + 1.0);
    if (kind == Kind::kLow) {
      s.b0 = k * norm;
      s.b1 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -norm;
    }
    s.a1 = (k - 1.0) * norm;
    sos.push_back(s);
  }
  return sos;
}

void run_pass(const SosFilter& sos, std::vector<double>& x) {
  if (x.empty()) return;
  double steady_in = x.front();
  for (const Biquad& s : sos) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double steady_out = gain * steady_in;
    double z2 = s.b2 * steady_in - s.a2 * steady_out;
    double z1 = s.b1 * steady_in - s.a1 * steady_out + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    steady_in = steady_out;
  }
}

}  // namespace

SosFilter butterworth_lowpass(int order, double cutoff_hz, double rate_hz) {
  return design(Kind::kLow, order, cutoff_hz, rate_hz);
}

SosFilter butterworth_highpass(int order, double cutoff_hz, double rate_hz) {
  return design(Kind::kHigh, order, cutoff_hz, rate_hz);
}

std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_pass(sos, y);
  return y;
}

std::vector<double> filtfilt(const SosFilter& sos, std::span<const double> x, size_t padlen) {
  if (x.empty()) return {};
  const size_t n = x.size();
  const size_t pad = std::min(padlen, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  run_pass(sos, ext);
  std::reverse(ext.begin(), ext.end());
  run_pass(sos, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

double magnitude_response(const SosFilter& sos, double freq_hz, double rate_hz) {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / rate_hz);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

}  // namespace valence
