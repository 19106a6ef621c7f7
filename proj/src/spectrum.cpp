#include "valence/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/fft.hpp"

namespace valence {

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  // Periodic form, the usual choice for spectral estimation.
  for (size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::vector<double> linear_detrend(std::span<const double> x) {
  const size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  if (n < 2) {
    for (double& v : out) v = 0.0;
    return out;
  }
  const double tm = 0.5 * static_cast<double>(n - 1);
  const double xm = mean(x);
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tm;
    sxy += dt * (x[i] - xm);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  for (size_t i = 0; i < n; ++i) out[i] = x[i] - xm - slope * (static_cast<double>(i) - tm);
  return out;
}

namespace {

// Adds the one-sided windowed periodogram of `seg` into `acc`.
void accumulate_segment(std::span<const double> seg, const std::vector<double>& window,
                        double scale, std::vector<double>& acc) {
  std::vector<double> tapered(seg.size());
  for (size_t i = 0; i < seg.size(); ++i) tapered[i] = seg[i] * window[i];
  const auto spec = real_fft(tapered);
  const size_t n = seg.size();
  for (size_t k = 0; k < spec.size(); ++k) {
    double p = std::norm(spec[k]) * scale;
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    if (!edge) p *= 2.0;
    acc[k] += p;
  }
}

Psd make_axis(size_t n, double rate_hz) {
  Psd psd;
  psd.df = rate_hz / static_cast<double>(n);
  psd.freq.resize(n / 2 + 1);
  for (size_t k = 0; k < psd.freq.size(); ++k) psd.freq[k] = psd.df * static_cast<double>(k);
  psd.power.assign(psd.freq.size(), 0.0);
  return psd;
}

}  // namespace

Psd periodogram(std::span<const double> x, double rate_hz, Detrend detrend) {
  require(x.size() >= 2, "periodogram needs at least two samples");
  require(rate_hz > 0.0, "sampling rate must be positive");
  std::vector<double> seg;
  switch (detrend) {
    case Detrend::kNone: seg.assign(x.begin(), x.end()); break;
    case Detrend::kConstant: {
      const double m = mean(x);
      seg.reserve(x.size());
      for (double v : x) seg.push_back(v - m);
      break;
    }
    case Detrend::kLinear: seg = linear_detrend(x); break;
  }
  const auto window = hann_window(seg.size());
  const double wss = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  Psd psd = make_axis(seg.size(), rate_hz);
  accumulate_segment(seg, window, 1.0 / (rate_hz * wss), psd.power);
  return psd;
}

Psd welch(std::span<const double> x, double rate_hz, const WelchOptions& options) {
  require(rate_hz > 0.0, "sampling rate must be positive");
  require(options.segment_s > 0.0, "Welch segment length must be positive");
  require(options.overlap >= 0.0 && options.overlap < 1.0, "Welch overlap must be in [0, 1)");
  require(x.size() >= 2, "Welch estimate needs at least two samples");
  size_t nseg = static_cast<size_t>(std::lround(options.segment_s * rate_hz));
  nseg = std::clamp<size_t>(nseg, 2, x.size());
  const size_t step =
      std::max<size_t>(1, static_cast<size_t>(std::lround(nseg * (1.0 - options.overlap))));

  const auto window = hann_window(nseg);
  const double wss = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  Psd psd = make_axis(nseg, rate_hz);
  size_t count = 0;
  std::vector<double> seg(nseg);
  for (size_t start = 0; start + nseg <= x.size(); start += step) {
    const auto part = x.subspan(start, nseg);
    const double m = mean(part);
    for (size_t i = 0; i < nseg; ++i) seg[i] = part[i] - m;
    accumulate_segment(seg, window, 1.0 / (rate_hz * wss), psd.power);
    ++count;
  }
  for (double& p : psd.power) p /= static_cast<double>(count);
  return psd;
}

double band_sum(const Psd& psd, double lo_hz, double hi_hz) {
  double acc = 0.0;
  for (size_t k = 0; k < psd.freq.size(); ++k) {
    if (psd.freq[k] >= lo_hz && psd.freq[k] < hi_hz) acc += psd.power[k];
  }
  return acc * psd.df;
}

double band_trapezoid(const Psd& psd, double lo_hz, double hi_hz) {
  double acc = 0.0;
  for (size_t k = 0; k + 1 < psd.freq.size(); ++k) {
    const bool in0 = psd.freq[k] >= lo_hz && psd.freq[k] < hi_hz;
    const bool in1 = psd.freq[k + 1] >= lo_hz && psd.freq[k + 1] < hi_hz;
    if (in0 && in1) acc += 0.5 * (psd.power[k] + psd.power[k + 1]) * psd.df;
  }
  return acc;
}

}  // namespace valence
