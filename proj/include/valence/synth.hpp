#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "valence/dataset.hpp"
#include "valence/eeg.hpp"
#include "valence/hrv.hpp"
#include "valence/ml.hpp"
#include "valence/signal.hpp"

namespace valence::synth {

struct RrSpec {
  double base_ms = 800.0;
  double lf_amp_ms = 0.0;
  double lf_hz = 0.10;
  double hf_amp_ms = 0.0;
  double hf_hz = 0.25;
  double noise_ms = 0.0;
  double duration_s = 60.0;
  double t_start = 0.0;
};

/// RR(t) = base + lf_amp sin(2 pi lf t) + hf_amp sin(2 pi hf t) + N(0, noise),
/// evaluated at each beat; t_{k+1} = t_k + RR(t_k) / 1000 until duration.
hrv::IbiSeries gen_rr(const RrSpec& spec, std::uint64_t seed);

/// Same model with a time-varying noise level, for condition-dependent HRV.
hrv::IbiSeries gen_rr(const RrSpec& spec, const std::function<double(double)>& noise_ms_at, std::uint64_t seed);

struct EcgOptions {
  double rate = 256.0;
  double snr_db = std::numeric_limits<double>::infinity();
  /// Recording length; 0 means one second past the last beat.
  double duration_s = 0.0;
  double t0 = 0.0;
};

/// P-QRS-T Gaussian template at every beat time plus white noise at the
/// requested SNR (relative to the clean signal's mean square).
TimeSeries gen_ecg(const hrv::IbiSeries& ibi, const EcgOptions& options, std::uint64_t seed);

struct BandComponent {
  double lo = 8.0;
  double hi = 13.0;
  double power = 1.0;  // mean square, uV^2
};

using ChannelSpec = std::pair<std::string, std::vector<BandComponent>>;

/// Per channel, the sum of independent band-limited noise components each
/// scaled to its target mean square.
MultiChannelRecording gen_eeg(const std::vector<ChannelSpec>& channels, double rate, double duration_s,
                              std::uint64_t seed);

/// Unit mean-square noise limited to [lo, hi] Hz.
std::vector<double> band_noise(size_t n, double lo, double hi, double rate, std::uint64_t seed);

/// Multiplicative band-power effect on one region, as natural-log factors.
struct EegEffect {
  eeg::Region region;
  eeg::Band band;
  double log_positive = 0.0;
  double log_negative = 0.0;
};

struct TempSpec {
  // Positive, Negative, Baseline.
  std::array<double, 3> mean_c = {28.767, 28.847, 27.087};
  std::array<double, 3> subject_sd_c = {1.515, 1.486, 1.552};
  std::array<double, 3> female_delta_c = {0.0, 0.0, 0.0};
  std::array<double, 3> male_delta_c = {0.0, 0.0, 0.0};
  double trial_sd_c = 0.3;
  double noise_sd_c = 0.02;
  double spike_probability = 0.2;  // per trial, one 45 C sample
};

struct HrvSpec {
  double base_ms = 800.0;
  double base_sd_ms = 50.0;
  double lf_amp_ms = 20.0;
  double hf_amp_ms = 20.0;
  // Positive, Negative, Baseline.
  std::array<double, 3> noise_ms = {20.0, 20.0, 20.0};
  double ecg_snr_db = 20.0;
};

struct DatasetSpec {
  size_t subjects = 24;
  size_t females = 8;
  size_t positive_videos = 7;
  size_t negative_videos = 7;
  double clip_min_s = 43.0;
  double clip_max_s = 78.0;
  double baseline_s = 30.0;
  double eeg_rate = 128.0;
  double ecg_rate = 256.0;
  double temp_rate = 1.0;
  bool with_eeg = true;
  bool with_ecg = true;
  bool with_temp = true;
  std::vector<EegEffect> eeg_effects;
  double eeg_effect_scale = 1.0;
  double eeg_subject_sd = 0.2;  // log gain per channel and subject
  double eeg_trial_sd = 0.1;    // log jitter per channel, band and trial
  TempSpec temp;
  HrvSpec hrv;
  std::string preset = "custom";

  /// paper-shape, paper-means, null, sex-temp.
  static DatasetSpec preset_named(std::string_view name);
  static std::vector<std::string> preset_names();
  void validate() const;
};

/// The lateralisation pattern used by the paper-shape preset.
std::vector<EegEffect> paper_eeg_effects();

/// Electrode labels the generator writes (every electrode of the standard montage).
std::vector<std::string> electrode_labels();

/// Lazily generated subjects; subject i depends only on (spec, seed, i).
class SyntheticSource : public io::SubjectSource {
 public:
  SyntheticSource(DatasetSpec spec, std::uint64_t seed);
  size_t size() const override { return spec_.subjects; }
  std::string id(size_t index) const override;
  io::SubjectData load(size_t index) const override;

  const DatasetSpec& spec() const { return spec_; }
  const std::vector<TrialSpec>& timeline(size_t index) const { return timelines_.at(index); }
  double recording_s(size_t index) const;
  Sex sex(size_t index) const { return sexes_.at(index); }
  /// Ground-truth block for one subject (beat times, trial temperatures, ...).
  nlohmann::ordered_json truth(size_t index) const;
  nlohmann::ordered_json truth_summary() const;

 private:
  struct Generated {
    io::SubjectData data;
    nlohmann::ordered_json truth;
  };
  Generated generate(size_t index, bool signals) const;

  DatasetSpec spec_;
  std::uint64_t seed_;
  std::vector<Sex> sexes_;
  std::vector<double> temp_z_;
  std::vector<std::vector<TrialSpec>> timelines_;
};

/// Writes the dataset into `out` (created via a sibling temp directory and a
/// rename) plus ground_truth.json. Refuses an existing `out` unless `force`.
void write_dataset(const std::filesystem::path& out, const DatasetSpec& spec, std::uint64_t seed,
                   size_t threads = 1, bool force = false);

struct MatrixSpec {
  size_t subjects = 6;
  size_t trials_per_class = 8;
  std::vector<std::string> feature_names;
  /// Columns with a class shift, in units of the within-class SD.
  std::vector<std::pair<std::string, double>> effects;
};

/// Gaussian feature rows (one per trial) with shifts on the listed columns
/// for Positive rows.
ml::FeatureMatrix gen_feature_matrix(const MatrixSpec& spec, std::uint64_t seed);

}  // namespace valence::synth
