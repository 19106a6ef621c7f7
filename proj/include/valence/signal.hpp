#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace valence {

enum class Unit { kMicrovolt, kMillivolt, kCelsius, kMillisecond, kDimensionless };

/// Uniformly sampled signal. Sample i sits at t0 + i / rate seconds.
struct TimeSeries {
  std::vector<double> samples;
  double rate = 1.0;
  double t0 = 0.0;
  Unit unit = Unit::kDimensionless;
  std::string label;

  size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / rate; }
  double end_time() const { return t0 + duration(); }
};

/// Throws on a non-positive rate or a non-finite sample.
void validate(const TimeSeries& ts);

enum class Sex { kFemale, kMale };
enum class Modality { kEeg, kEcg, kTemp };
enum class Label { kPositive, kNegative, kBaseline };

const char* to_string(Sex sex);
const char* to_string(Label label);
std::optional<Sex> parse_sex(std::string_view text);
std::optional<Label> parse_label(std::string_view text);

struct SubjectMeta {
  std::string id;
  Sex sex = Sex::kMale;
  std::optional<double> age;
};

struct MultiChannelRecording {
  std::vector<TimeSeries> channels;
  SubjectMeta subject;
  Modality modality = Modality::kEeg;

  double rate() const { return channels.front().rate; }
  size_t length() const { return channels.front().size(); }
  /// Index of the channel with this label, if present.
  std::optional<size_t> find(std::string_view label) const;
};

/// Throws unless channels share rate, length and t0 and labels are unique.
void validate(const MultiChannelRecording& rec);

struct TrialSpec {
  double start = 0.0;
  double duration = 0.0;
  Label label = Label::kBaseline;
  std::string trial_id;
};

TimeSeries resample(const TimeSeries& ts, double target_rate);

TimeSeries highpass(const TimeSeries& ts, double cutoff_hz);
TimeSeries lowpass(const TimeSeries& ts, double cutoff_hz);

MultiChannelRecording car_rereference(const MultiChannelRecording& rec);

struct ZScored {
  std::vector<double> values;
  bool zero_variance = false;
};

ZScored zscore(std::span<const double> v);

struct OutlierReplacement {
  std::vector<double> values;
  std::vector<bool> mask;
  /// Scaled MAD was zero; the rule then flags every value off the median.
  bool degenerate = false;
  size_t count() const;
};

/// Values more than three scaled MADs from the median are replaced by the
/// mean of the remaining values.
OutlierReplacement mad_outlier_replace(std::span<const double> v);

struct Segment {
  TrialSpec trial;
  size_t window_index = 0;
  MultiChannelRecording data;
};

/// Cuts each trial into floor(duration / window) back-to-back windows.
std::vector<Segment> segment(const MultiChannelRecording& rec, std::span<const TrialSpec> trials,
                             double window_s);

/// Slice of one series covering [start, start + length) seconds.
TimeSeries slice(const TimeSeries& ts, double start_s, double length_s);

}  // namespace valence
