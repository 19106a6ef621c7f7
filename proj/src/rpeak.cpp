#include <algorithm>
#include <cmath>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/hrv.hpp"

namespace valence::hrv {

namespace {

// Centered moving average of the squared signal.
std::vector<double> energy_envelope(std::span<const double> x, size_t half) {
  const size_t n = x.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  std::vector<double> env(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i >= half ? i - half : 0;
    const size_t hi = std::min(n, i + half + 1);
    env[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return env;
}

}  // namespace

std::vector<double> detect_rpeaks(const TimeSeries& ecg, const RPeakOptions& options) {
  require(ecg.rate >= 100.0, "R-peak detection needs at least 100 Hz");
  if (ecg.duration() < 5.0) fail(ErrorCode::kTooShort, "R-peak detection needs at least 5 s of ECG");

  const TimeSeries filtered = highpass(ecg, options.highpass_hz);
  const auto& x = filtered.samples;
  const auto half = static_cast<size_t>(std::lround(options.envelope_s * ecg.rate / 2.0));
  const auto env = energy_envelope(x, std::max<size_t>(half, 1));

  double raw_amp = 0.0;
  double amp = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    raw_amp = std::max(raw_amp, std::abs(ecg.samples[k]));
    amp = std::max(amp, std::abs(x[k]));
  }
  const double peak_level = quantile(env, 0.98);
  if (!(amp > 1e-9 * raw_amp) || !(peak_level > 0.0)) {
    fail(ErrorCode::kNoPeaks, "flat ECG: no QRS energy found");
  }
  const double threshold = std::max(median(env) + options.mad_k * kMadScale * mad(env),
                                    options.floor_fraction * peak_level);

  // Each supra-threshold run of the envelope contributes its largest |x|.
  struct Candidate {
    size_t index;
    double height;
  };
  std::vector<Candidate> candidates;
  size_t i = 0;
  while (i < env.size()) {
    if (env[i] <= threshold) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < env.size() && env[j] > threshold) ++j;
    size_t best = i;
    for (size_t k = i; k < j; ++k) {
      if (std::abs(x[k]) > std::abs(x[best])) best = k;
    }
    candidates.push_back({best, std::abs(x[best])});
    i = j;
  }

  const auto refractory = static_cast<size_t>(std::lround(options.refractory_s * ecg.rate));
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    if (!kept.empty() && c.index - kept.back().index < refractory) {
      if (c.height > kept.back().height) kept.back() = c;
      continue;
    }
    kept.push_back(c);
  }
  if (kept.empty()) fail(ErrorCode::kNoPeaks, "no QRS complexes detected");

  std::vector<double> beats;
  beats.reserve(kept.size());
  for (const auto& c : kept) beats.push_back(ecg.t0 + static_cast<double>(c.index) / ecg.rate);
  return beats;
}

}  // namespace valence::hrv
