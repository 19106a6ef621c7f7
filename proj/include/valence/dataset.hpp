#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "valence/signal.hpp"

namespace valence::io {

/// One subject's recordings. A missing modality file leaves its field empty.
struct SubjectData {
  SubjectMeta meta;
  std::optional<MultiChannelRecording> eeg;
  std::optional<TimeSeries> ecg;
  std::optional<TimeSeries> temp;
  std::vector<TrialSpec> trials;
};

/// Random access to subjects without holding the whole dataset in memory.
class SubjectSource {
 public:
  virtual ~SubjectSource() = default;
  virtual size_t size() const = 0;
  virtual std::string id(size_t index) const = 0;
  virtual SubjectData load(size_t index) const = 0;
};

/// Layout: <root>/<subject>/{eeg.csv, ecg.csv, temp.csv, trials.csv, meta.json}.
class DirectorySource : public SubjectSource {
 public:
  explicit DirectorySource(std::filesystem::path root);
  size_t size() const override { return subjects_.size(); }
  std::string id(size_t index) const override { return subjects_.at(index); }
  SubjectData load(size_t index) const override;

 private:
  std::filesystem::path root_;
  std::vector<std::string> subjects_;
};

/// Parses one subject directory. Schema problems throw Error(kSchema) with
/// file and line; softer issues are appended to `warnings`.
SubjectData read_subject(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

/// Writes one subject directory; each file goes through a temp file + rename.
void write_subject(const std::filesystem::path& dir, const SubjectData& subject);

/// Writes `content` to `path` via a sibling temp file and an atomic rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct ValidationReport {
  size_t subjects = 0;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

ValidationReport validate_dataset(const std::filesystem::path& root);

}  // namespace valence::io
