#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "valence/signal.hpp"

namespace valence::hrv {

/// Interbeat intervals. intervals_ms[i] spans beat_times_s[i] .. beat_times_s[i + 1].
struct IbiSeries {
  std::vector<double> intervals_ms;
  std::vector<double> beat_times_s;
  std::vector<bool> corrected_mask;

  size_t size() const { return intervals_ms.size(); }
};

/// Throws when the interval/beat-time mapping is broken.
void validate(const IbiSeries& ibi);

struct RPeakOptions {
  double highpass_hz = 10.0;
  double envelope_s = 0.150;
  double refractory_s = 0.250;
  /// Envelope threshold = max(median + k * scaled MAD, floor_fraction * p98).
  double mad_k = 4.0;
  double floor_fraction = 0.2;
};

/// R-peak times in seconds (absolute, i.e. including ecg.t0).
std::vector<double> detect_rpeaks(const TimeSeries& ecg, const RPeakOptions& options = {});

IbiSeries ibi_from_peaks(std::span<const double> beat_times_s);

struct ArtifactOptions {
  size_t window = 21;
  double mad_k = 3.0;
  /// Deviations below this are never treated as ectopic, which keeps
  /// quantised near-constant series from flagging on a zero MAD.
  double min_deviation_ms = 20.0;
  /// Nor are deviations within this fraction of the local median. A short
  /// window of quantised sinus intervals can have a MAD far below its spread.
  double min_relative_deviation = 0.2;
  double min_interval_ms = 300.0;
  double max_interval_ms = 2000.0;
  double max_flagged_fraction = 0.20;
};

/// Flags ectopic intervals and replaces them by a cubic spline through the
/// valid intervals (indexed by their end beat time). Beat times are rebuilt
/// from the first beat so the interval/beat mapping still holds.
IbiSeries correct_artifacts(const IbiSeries& ibi, const ArtifactOptions& options = {});

struct TimeDomain {
  double mean_rr = 0.0;
  double median_rr = 0.0;
  double sdnn = 0.0;
  double rmssd = 0.0;
  int nn50 = 0;
  double pnn50 = 0.0;
};

/// NN50 counts successive differences strictly above 50 ms; pNN50 divides by
/// the number of successive pairs.
TimeDomain hrv_time_domain(const IbiSeries& ibi);

struct FrequencyOptions {
  double tachogram_hz = 4.0;
  double min_duration_s = 40.0;
};

struct BandEdges {
  double lo;
  double hi;
};

inline constexpr BandEdges kVlf{0.003, 0.04};
inline constexpr BandEdges kLf{0.04, 0.15};
inline constexpr BandEdges kHf{0.15, 0.4};

struct FrequencyDomain {
  double vlf_abs = 0.0;
  double lf_abs = 0.0;
  double hf_abs = 0.0;
  double total_power = 0.0;
  std::optional<double> vlf_pct;
  std::optional<double> lf_pct;
  std::optional<double> hf_pct;
  std::optional<double> lf_nu;
  std::optional<double> hf_nu;
  std::optional<double> lf_hf;  // unset when HF power is zero
};

FrequencyDomain hrv_frequency_domain(const IbiSeries& ibi, const FrequencyOptions& options = {});

struct Poincare {
  double sd1 = 0.0;
  double sd2 = 0.0;
  std::optional<double> sd1_sd2;
};

Poincare poincare(const IbiSeries& ibi);

struct HrvFeatures {
  TimeDomain time;
  FrequencyDomain frequency;
  Poincare nonlinear;
};

HrvFeatures hrv_features(const IbiSeries& ibi, const FrequencyOptions& options = {});

inline constexpr std::array<std::string_view, 19> kFieldNames = {
    "mean_rr", "median_rr", "sdnn",    "rmssd",   "nn50",   "pnn50",  "vlf_abs",
    "lf_abs",  "hf_abs",    "total_power", "vlf_pct", "lf_pct", "hf_pct", "lf_nu",
    "hf_nu",   "lf_hf",     "sd1",     "sd2",     "sd1_sd2"};

/// Values in kFieldNames order; undefined ratios are nullopt.
std::array<std::optional<double>, 19> field_values(const HrvFeatures& f);

}  // namespace valence::hrv
