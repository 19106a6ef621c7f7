#include "valence/signal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/filter.hpp"
#include "valence/spline.hpp"

namespace valence {

namespace {

constexpr int kFilterOrder = 4;

TimeSeries with_samples(const TimeSeries& like, std::vector<double> samples) {
  TimeSeries out = like;
  out.samples = std::move(samples);
  return out;
}

TimeSeries apply_zero_phase(const TimeSeries& ts, const SosFilter& sos, double cutoff_hz) {
  const size_t min_pad = 3 * (2 * sos.size() + 1);
  const auto settle = static_cast<size_t>(std::lround(3.0 * ts.rate / cutoff_hz));
  return with_samples(ts, filtfilt(sos, ts.samples, std::max(min_pad, settle)));
}

}  // namespace

void validate(const TimeSeries& ts) {
  require(ts.rate > 0.0 && std::isfinite(ts.rate), "sampling rate must be positive");
  for (size_t i = 0; i < ts.samples.size(); ++i) {
    if (!std::isfinite(ts.samples[i])) {
      fail(ErrorCode::kInvalidArgument,
           "non-finite sample at index " + std::to_string(i) + " of '" + ts.label + "'");
    }
  }
}

const char* to_string(Sex sex) { return sex == Sex::kFemale ? "female" : "male"; }

const char* to_string(Label label) {
  switch (label) {
    case Label::kPositive: return "Positive";
    case Label::kNegative: return "Negative";
    case Label::kBaseline: return "Baseline";
  }
  return "?";
}

std::optional<Sex> parse_sex(std::string_view text) {
  if (text == "female" || text == "F" || text == "f") return Sex::kFemale;
  if (text == "male" || text == "M" || text == "m") return Sex::kMale;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "Positive") return Label::kPositive;
  if (text == "Negative") return Label::kNegative;
  if (text == "Baseline") return Label::kBaseline;
  return std::nullopt;
}

std::optional<size_t> MultiChannelRecording::find(std::string_view label) const {
  for (size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].label == label) return i;
  }
  return std::nullopt;
}

void validate(const MultiChannelRecording& rec) {
  require(!rec.channels.empty(), "recording has no channels");
  std::set<std::string> labels;
  for (const auto& ch : rec.channels) {
    validate(ch);
    require(ch.rate == rec.channels.front().rate, "channels differ in sampling rate");
    require(ch.size() == rec.channels.front().size(), "channels differ in length");
    require(ch.t0 == rec.channels.front().t0, "channels differ in start time");
    require(labels.insert(ch.label).second, "duplicate channel label '" + ch.label + "'");
  }
}

TimeSeries resample(const TimeSeries& ts, double target_rate) {
  require(target_rate > 0.0, "target rate must be positive");
  require(!ts.samples.empty(), "cannot resample an empty series");
  if (target_rate == ts.rate) return ts;

  const auto out_len = static_cast<size_t>(
      std::llround(static_cast<double>(ts.size()) * target_rate / ts.rate));
  if (ts.size() == 1) {
    return with_samples(
        TimeSeries{.samples = {}, .rate = target_rate, .t0 = ts.t0, .unit = ts.unit, .label = ts.label},
        std::vector<double>(out_len, ts.samples.front()));
  }

  TimeSeries source = ts;
  if (target_rate < ts.rate) source = lowpass(ts, 0.45 * target_rate);

  std::vector<double> t(ts.size());
  for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / ts.rate;
  const CubicSpline spline(t, source.samples);
  std::vector<double> query(out_len);
  for (size_t j = 0; j < out_len; ++j) query[j] = static_cast<double>(j) / target_rate;

  TimeSeries out = ts;
  out.rate = target_rate;
  out.samples = spline.evaluate_sorted(query);
  return out;
}

TimeSeries highpass(const TimeSeries& ts, double cutoff_hz) {
  require(cutoff_hz > 0.0 && cutoff_hz < ts.rate / 2.0, "highpass cutoff must lie below Nyquist");
  return apply_zero_phase(ts, butterworth_highpass(kFilterOrder, cutoff_hz, ts.rate), cutoff_hz);
}

TimeSeries lowpass(const TimeSeries& ts, double cutoff_hz) {
  require(cutoff_hz > 0.0 && cutoff_hz < ts.rate / 2.0, "lowpass cutoff must lie below Nyquist");
  return apply_zero_phase(ts, butterworth_lowpass(kFilterOrder, cutoff_hz, ts.rate), cutoff_hz);
}

MultiChannelRecording car_rereference(const MultiChannelRecording& rec) {
  require(rec.channels.size() >= 2, "common average reference needs at least two channels");
  validate(rec);
  const size_t n = rec.length();
  std::vector<double> avg(n, 0.0);
  for (const auto& ch : rec.channels) {
    for (size_t i = 0; i < n; ++i) avg[i] += ch.samples[i];
  }
  const double inv = 1.0 / static_cast<double>(rec.channels.size());
  for (double& a : avg) a *= inv;

  MultiChannelRecording out = rec;
  for (auto& ch : out.channels) {
    for (size_t i = 0; i < n; ++i) ch.samples[i] -= avg[i];
  }
  return out;
}

ZScored zscore(std::span<const double> v) {
  require(v.size() >= 2, "z-scoring needs at least two values");
  ZScored out;
  out.values.resize(v.size(), 0.0);
  const double m = mean(v);
  const double sd = sample_sd(v);
  if (!(sd > 0.0)) {
    out.zero_variance = true;
    return out;
  }
  for (size_t i = 0; i < v.size(); ++i) out.values[i] = (v[i] - m) / sd;
  return out;
}

size_t OutlierReplacement::count() const {
  return static_cast<size_t>(std::count(mask.begin(), mask.end(), true));
}

OutlierReplacement mad_outlier_replace(std::span<const double> v) {
  require(v.size() >= 3, "outlier replacement needs at least three values");
  OutlierReplacement out;
  out.values.assign(v.begin(), v.end());
  out.mask.assign(v.size(), false);

  const double med = median(v);
  const double threshold = 3.0 * kMadScale * mad(v);
  out.degenerate = threshold == 0.0;

  double keep_sum = 0.0;
  size_t keep_n = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i] - med) > threshold) {
      out.mask[i] = true;
    } else {
      keep_sum += v[i];
      ++keep_n;
    }
  }
  // At least half the values sit within one MAD of the median, so keep_n > 0.
  const double replacement = keep_sum / static_cast<double>(keep_n);
  for (size_t i = 0; i < v.size(); ++i) {
    if (out.mask[i]) out.values[i] = replacement;
  }
  return out;
}

TimeSeries slice(const TimeSeries& ts, double start_s, double length_s) {
  const long long first = std::llround((start_s - ts.t0) * ts.rate);
  const long long count = std::llround(length_s * ts.rate);
  if (first < 0 || count <= 0 || first + count > static_cast<long long>(ts.size())) {
    fail(ErrorCode::kOutOfBounds, "window [" + std::to_string(start_s) + ", " +
                                      std::to_string(start_s + length_s) +
                                      ") s lies outside '" + ts.label + "'");
  }
  TimeSeries out = ts;
  out.t0 = ts.t0 + static_cast<double>(first) / ts.rate;
  out.samples.assign(ts.samples.begin() + first, ts.samples.begin() + first + count);
  return out;
}

std::vector<Segment> segment(const MultiChannelRecording& rec, std::span<const TrialSpec> trials,
                             double window_s) {
  require(window_s > 0.0, "window length must be positive");
  validate(rec);
  std::vector<Segment> out;
  for (const auto& trial : trials) {
    require(trial.start >= 0.0 && trial.duration > 0.0,
            "trial '" + trial.trial_id + "' has a negative start or empty duration");
    const double half_sample = 0.5 / rec.rate();
    const double rec_end = rec.channels.front().end_time();
    if (trial.start < rec.channels.front().t0 - half_sample ||
        trial.start + trial.duration > rec_end + half_sample) {
      fail(ErrorCode::kOutOfBounds, "trial '" + trial.trial_id + "' lies outside the recording");
    }
    const auto windows = static_cast<size_t>(std::floor(trial.duration / window_s + 1e-9));
    for (size_t w = 0; w < windows; ++w) {
      Segment seg{.trial = trial, .window_index = w, .data = {}};
      seg.data.subject = rec.subject;
      seg.data.modality = rec.modality;
      for (const auto& ch : rec.channels) {
        seg.data.channels.push_back(
            slice(ch, trial.start + static_cast<double>(w) * window_s, window_s));
      }
      out.push_back(std::move(seg));
    }
  }
  return out;
}

}  // namespace valence
