#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "valence/eeg.hpp"
#include "valence/ml.hpp"
#include "valence/selection.hpp"
#include "valence/spectrum.hpp"

namespace valence {

enum class ModalitySet { kEeg, kTempEcg, kEegTemp, kEegEcg, kAll };
enum class Population { kAll, kFemale, kMale };
enum class HrvBlock { kNn50, kFull };

std::string_view to_string(ModalitySet m);
std::string_view to_string(Population p);

/// Experiment configuration. The file format is flat `key = value` text with
/// `#` comments; list values are comma-separated. Every key has a default.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  double window_s = 28.0;
  size_t folds = 5;
  size_t k = 5;
  std::vector<ml::ClassifierKind> classifiers = {ml::ClassifierKind::kKnn, ml::ClassifierKind::kQda};
  std::vector<ml::SchemeKind> schemes = {ml::SchemeKind::kSubjectDependent,
                                         ml::SchemeKind::kSubjectIndependent};
  std::vector<ModalitySet> modalities = {ModalitySet::kEeg, ModalitySet::kTempEcg,
                                         ModalitySet::kEegTemp, ModalitySet::kEegEcg,
                                         ModalitySet::kAll};
  std::vector<Population> populations = {Population::kAll, Population::kFemale, Population::kMale};
  bool sa_enabled = false;
  ml::SaOptions sa;
  HrvBlock hrv_block = HrvBlock::kNn50;
  double tachogram_hz = 4.0;
  double ecg_resample_hz = 256.0;
  double eeg_highpass_hz = 0.5;
  double eeg_lowpass_hz = 45.0;
  WelchOptions welch;
  eeg::Montage montage = eeg::Montage::standard();

  /// Throws Error(kSchema) naming the offending line.
  static ExperimentConfig parse(std::string_view text, std::string_view origin = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Every key with its effective value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> effective() const;
  std::string to_text() const;
};

}  // namespace valence
