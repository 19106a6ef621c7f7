#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valence/config.hpp"
#include "valence/dataset.hpp"
#include "valence/eeg.hpp"
#include "valence/ml.hpp"
#include "valence/signal.hpp"

namespace valence::fusion {

inline constexpr const char* kToolName = "valence";
inline constexpr const char* kToolVersion = "0.1.0";

/// One window with every modality on the EEG sample grid.
struct AlignedWindow {
  TrialSpec trial;
  size_t window_index = 0;
  MultiChannelRecording eeg;
  TimeSeries ecg;
  TimeSeries temp;
};

/// High-pass, low-pass, then common average reference over all channels.
MultiChannelRecording preprocess_eeg(const MultiChannelRecording& raw, const ExperimentConfig& config);

/// The 19 HRV variables of one trial from the native-rate ECG. Frequency
/// fields stay empty for trials under 40 s, everything stays empty when no
/// usable beat series is found; `note` says why.
std::array<std::optional<double>, 19> trial_hrv(const TimeSeries& ecg, const TrialSpec& trial,
                                                double tachogram_hz, std::string* note = nullptr);

/// ECG goes through `ecg_resample_hz` first, then both ECG and temperature
/// are resampled to the EEG rate over the whole recording before cutting.
std::vector<AlignedWindow> align_modalities(const MultiChannelRecording& eeg, const TimeSeries& ecg,
                                            const TimeSeries& temp, std::span<const TrialSpec> trials,
                                            double window_s, double ecg_resample_hz = 256.0);

struct WindowRow {
  std::string subject;
  Sex sex = Sex::kMale;
  std::string trial_id;
  Label label = Label::kBaseline;
  size_t window_index = 0;
  eeg::WindowFeatures eeg;
  double temp_mean = 0.0;
  std::array<double, 19> hrv{};  // kFieldNames order; nn50 always filled
};

struct TrialRow {
  std::string subject;
  Sex sex = Sex::kMale;
  std::string trial_id;
  Label label = Label::kBaseline;
  std::optional<double> temp_mean;
  size_t temp_replaced = 0;
  std::array<std::optional<double>, 19> hrv{};
  std::string note;  // why a trial-level value is missing
};

struct Exclusion {
  std::string subject;
  std::string reason;
};

struct FusedDataset {
  std::vector<WindowRow> windows;
  std::vector<TrialRow> trials;
  std::vector<Exclusion> excluded;
  std::vector<std::string> subjects;
};

/// Preprocesses and extracts every subject of `source`. Subjects missing a
/// modality are excluded and listed; other failures propagate with the
/// subject and trial prefixed to the message.
FusedDataset extract_dataset(const io::SubjectSource& source, const ExperimentConfig& config,
                             size_t threads = 1);

/// Column names of a modality subset, in matrix order.
std::vector<std::string> modality_columns(ModalitySet set, HrvBlock block);

/// Non-baseline window rows of the population as a classification matrix.
ml::FeatureMatrix feature_matrix(const FusedDataset& data, ModalitySet set, HrvBlock block,
                                 Population population);

struct RunOptions {
  size_t threads = 1;
};

/// The whole experiment grid plus statistics tables, as a report bundle.
/// Output depends only on (data, config); never on `threads`.
nlohmann::ordered_json run_experiment(const io::SubjectSource& source, const ExperimentConfig& config,
                                      const RunOptions& options = {});

nlohmann::ordered_json run_experiment(const FusedDataset& data, const ExperimentConfig& config,
                                      const RunOptions& options = {});

/// Runs `count` independent jobs on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers stop.
void parallel_for(size_t count, size_t threads, const std::function<void(size_t)>& job);

}  // namespace valence::fusion
