#include "valence/hrv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/spectrum.hpp"
#include "valence/spline.hpp"

namespace valence::hrv {

namespace {

// Band powers at or below this (ms^2) are treated as absent when forming ratios.
constexpr double kPowerFloor = 1e-12;

std::vector<double> rebuild_beats(double first_beat_s, std::span<const double> intervals_ms) {
  std::vector<double> beats;
  beats.reserve(intervals_ms.size() + 1);
  beats.push_back(first_beat_s);
  for (double rr : intervals_ms) beats.push_back(beats.back() + rr / 1000.0);
  return beats;
}

}  // namespace

void validate(const IbiSeries& ibi) {
  require(ibi.beat_times_s.size() == ibi.intervals_ms.size() + 1,
          "beat times must outnumber intervals by one");
  require(ibi.corrected_mask.size() == ibi.intervals_ms.size(),
          "corrected mask must match the interval count");
  for (size_t i = 0; i < ibi.intervals_ms.size(); ++i) {
    require(ibi.intervals_ms[i] > 0.0, "intervals must be positive");
    const double span_ms = (ibi.beat_times_s[i + 1] - ibi.beat_times_s[i]) * 1000.0;
    require(std::abs(span_ms - ibi.intervals_ms[i]) <= 1e-6, "interval disagrees with beat times");
  }
}

IbiSeries ibi_from_peaks(std::span<const double> beat_times_s) {
  if (beat_times_s.size() < 2) fail(ErrorCode::kTooShort, "at least two beats are needed");
  IbiSeries ibi;
  ibi.beat_times_s.assign(beat_times_s.begin(), beat_times_s.end());
  for (size_t i = 1; i < beat_times_s.size(); ++i) {
    const double rr = (beat_times_s[i] - beat_times_s[i - 1]) * 1000.0;
    require(rr > 0.0, "beat times must be strictly increasing");
    ibi.intervals_ms.push_back(rr);
  }
  ibi.corrected_mask.assign(ibi.intervals_ms.size(), false);
  return ibi;
}

IbiSeries correct_artifacts(const IbiSeries& ibi, const ArtifactOptions& options) {
  const size_t n = ibi.size();
  if (n < 5) fail(ErrorCode::kTooShort, "artifact correction needs at least five intervals");
  require(options.window >= 3, "artifact window must cover at least three intervals");

  std::vector<bool> flagged(n, false);
  const size_t w = std::min(options.window, n);
  for (size_t i = 0; i < n; ++i) {
    const double rr = ibi.intervals_ms[i];
    if (rr < options.min_interval_ms || rr > options.max_interval_ms) {
      flagged[i] = true;
      continue;
    }
    // Centered window, shifted inward at the ends so it always holds w values.
    size_t lo = i >= w / 2 ? i - w / 2 : 0;
    lo = std::min(lo, n - w);
    const std::span<const double> local(ibi.intervals_ms.data() + lo, w);
    const double med = median(local);
    const double limit = std::max({options.mad_k * kMadScale * mad(local), options.min_deviation_ms,
                                   options.min_relative_deviation * med});
    flagged[i] = std::abs(rr - med) > limit;
  }

  const auto n_flagged = static_cast<size_t>(std::count(flagged.begin(), flagged.end(), true));
  if (static_cast<double>(n_flagged) > options.max_flagged_fraction * static_cast<double>(n)) {
    fail(ErrorCode::kTrialRejected, std::to_string(n_flagged) + " of " + std::to_string(n) +
                                        " intervals flagged as artifacts");
  }

  IbiSeries out = ibi;
  out.corrected_mask = flagged;
  if (n_flagged == 0) return out;

  std::vector<double> t_valid;
  std::vector<double> rr_valid;
  for (size_t i = 0; i < n; ++i) {
    if (!flagged[i]) {
      t_valid.push_back(ibi.beat_times_s[i + 1]);
      rr_valid.push_back(ibi.intervals_ms[i]);
    }
  }
  const CubicSpline spline(t_valid, rr_valid);
  for (size_t i = 0; i < n; ++i) {
    if (flagged[i]) {
      const double fill = spline(ibi.beat_times_s[i + 1]);
      if (!(fill > 0.0)) fail(ErrorCode::kNumerical, "spline produced a non-positive interval");
      out.intervals_ms[i] = fill;
    }
  }
  out.beat_times_s = rebuild_beats(ibi.beat_times_s.front(), out.intervals_ms);
  return out;
}

TimeDomain hrv_time_domain(const IbiSeries& ibi) {
  const auto& rr = ibi.intervals_ms;
  if (rr.size() < 2) fail(ErrorCode::kTooShort, "time-domain HRV needs at least two intervals");
  TimeDomain td;
  td.mean_rr = mean(rr);
  td.median_rr = median(rr);
  td.sdnn = sample_sd(rr);
  double sum_sq = 0.0;
  for (size_t i = 1; i < rr.size(); ++i) {
    const double d = rr[i] - rr[i - 1];
    sum_sq += d * d;
    if (std::abs(d) > 50.0) ++td.nn50;
  }
  const auto pairs = static_cast<double>(rr.size() - 1);
  td.rmssd = std::sqrt(sum_sq / pairs);
  td.pnn50 = 100.0 * td.nn50 / pairs;
  return td;
}

FrequencyDomain hrv_frequency_domain(const IbiSeries& ibi, const FrequencyOptions& options) {
  require(options.tachogram_hz > 0.0, "tachogram rate must be positive");
  if (ibi.size() < 4) fail(ErrorCode::kTooShort, "frequency-domain HRV needs at least four intervals");
  const double t_first = ibi.beat_times_s[1];
  const double t_last = ibi.beat_times_s.back();
  if (t_last - ibi.beat_times_s.front() < options.min_duration_s) {
    fail(ErrorCode::kTooShort, "tachogram shorter than " + std::to_string(options.min_duration_s) + " s");
  }

  // Each interval is placed at the beat that closes it.
  const std::span<const double> knots(ibi.beat_times_s.data() + 1, ibi.size());
  const CubicSpline spline(knots, ibi.intervals_ms);
  const auto n = static_cast<size_t>(std::floor((t_last - t_first) * options.tachogram_hz)) + 1;
  std::vector<double> grid(n);
  for (size_t i = 0; i < n; ++i) grid[i] = t_first + static_cast<double>(i) / options.tachogram_hz;
  const auto tachogram = spline.evaluate_sorted(grid);

  const Psd psd = periodogram(tachogram, options.tachogram_hz, Detrend::kLinear);
  FrequencyDomain fd;
  fd.vlf_abs = band_trapezoid(psd, kVlf.lo, kVlf.hi);
  fd.lf_abs = band_trapezoid(psd, kLf.lo, kLf.hi);
  fd.hf_abs = band_trapezoid(psd, kHf.lo, kHf.hi);
  fd.total_power = band_trapezoid(psd, kVlf.lo, kHf.hi);
  if (fd.total_power > kPowerFloor) {
    fd.vlf_pct = 100.0 * fd.vlf_abs / fd.total_power;
    fd.lf_pct = 100.0 * fd.lf_abs / fd.total_power;
    fd.hf_pct = 100.0 * fd.hf_abs / fd.total_power;
  }
  const double lf_hf_sum = fd.lf_abs + fd.hf_abs;
  if (lf_hf_sum > kPowerFloor) {
    fd.lf_nu = 100.0 * fd.lf_abs / lf_hf_sum;
    fd.hf_nu = 100.0 * fd.hf_abs / lf_hf_sum;
  }
  if (fd.hf_abs > kPowerFloor) fd.lf_hf = fd.lf_abs / fd.hf_abs;
  return fd;
}

Poincare poincare(const IbiSeries& ibi) {
  const auto& rr = ibi.intervals_ms;
  if (rr.size() < 3) fail(ErrorCode::kTooShort, "Poincare analysis needs at least three intervals");
  std::vector<double> minor(rr.size() - 1);
  std::vector<double> major(rr.size() - 1);
  for (size_t i = 0; i + 1 < rr.size(); ++i) {
    minor[i] = (rr[i + 1] - rr[i]) / std::numbers::sqrt2;
    major[i] = (rr[i + 1] + rr[i]) / std::numbers::sqrt2;
  }
  Poincare p;
  p.sd1 = std::sqrt(population_variance(minor));
  p.sd2 = std::sqrt(population_variance(major));
  // Rounding in beat times leaves a flat series with a tiny nonzero sd2.
  if (p.sd2 > 1e-9 * mean(rr)) p.sd1_sd2 = p.sd1 / p.sd2;
  return p;
}

HrvFeatures hrv_features(const IbiSeries& ibi, const FrequencyOptions& options) {
  return {hrv_time_domain(ibi), hrv_frequency_domain(ibi, options), poincare(ibi)};
}

std::array<std::optional<double>, 19> field_values(const HrvFeatures& f) {
  const auto& t = f.time;
  const auto& q = f.frequency;
  const auto& p = f.nonlinear;
  return {t.mean_rr,     t.median_rr, t.sdnn,     t.rmssd,     static_cast<double>(t.nn50),
          t.pnn50,       q.vlf_abs,   q.lf_abs,   q.hf_abs,    q.total_power,
          q.vlf_pct,     q.lf_pct,    q.hf_pct,   q.lf_nu,     q.hf_nu,
          q.lf_hf,       p.sd1,       p.sd2,      p.sd1_sd2};
}

}  // namespace valence::hrv
