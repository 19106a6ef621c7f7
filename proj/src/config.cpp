#include "valence/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "valence/error.hpp"
#include "valence/text.hpp"

namespace valence {

namespace {

constexpr std::array<std::string_view, 5> kModalityNames = {"EEG", "T+ECG", "EEG+T", "EEG+ECG", "ALL"};
constexpr std::array<std::string_view, 3> kPopulationNames = {"all", "female", "male"};

template <typename T, size_t N>
std::optional<T> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<T>(i);
  }
  return std::nullopt;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

class Parser {
 public:
  Parser(std::string_view origin, size_t line) : origin_(origin), line_(line) {}

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kSchema, std::string(origin_) + ":" + std::to_string(line_) + ": " + what);
  }

  double number(std::string_view v) const {
    const auto d = parse_double(v);
    if (!d) error("expected a number, got '" + std::string(v) + "'");
    return *d;
  }

  unsigned long long count(std::string_view v) const {
    const auto n = parse_unsigned(v);
    if (!n) error("expected a non-negative integer, got '" + std::string(v) + "'");
    return *n;
  }

  bool boolean(std::string_view v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    error("expected true/false, got '" + std::string(v) + "'");
  }

  std::vector<std::string_view> list(std::string_view v) const {
    std::vector<std::string_view> out;
    for (auto item : split(v, ',')) {
      item = trim(item);
      if (item.empty()) error("empty list item");
      out.push_back(item);
    }
    return out;
  }

 private:
  std::string_view origin_;
  size_t line_;
};

}  // namespace

std::string_view to_string(ModalitySet m) { return kModalityNames[static_cast<size_t>(m)]; }
std::string_view to_string(Population p) { return kPopulationNames[static_cast<size_t>(p)]; }

ExperimentConfig ExperimentConfig::parse(std::string_view text, std::string_view origin) {
  ExperimentConfig cfg;
  size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const Parser p(origin, line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.error("expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) p.error("key '" + std::string(key) + "' has no value");

    if (key == "seed") {
      cfg.seed = p.count(value);
    } else if (key == "window_s") {
      cfg.window_s = p.number(value);
      if (!(cfg.window_s > 0.0)) p.error("window_s must be positive");
    } else if (key == "folds") {
      cfg.folds = p.count(value);
      if (cfg.folds < 2) p.error("folds must be at least 2");
    } else if (key == "k") {
      cfg.k = p.count(value);
      if (cfg.k < 1) p.error("k must be at least 1");
    } else if (key == "classifiers") {
      cfg.classifiers.clear();
      for (auto item : p.list(value)) {
        if (item == "KNN") cfg.classifiers.push_back(ml::ClassifierKind::kKnn);
        else if (item == "QDA") cfg.classifiers.push_back(ml::ClassifierKind::kQda);
        else p.error("unknown classifier '" + std::string(item) + "' (KNN, QDA)");
      }
    } else if (key == "schemes" || key == "scheme") {
      cfg.schemes.clear();
      for (auto item : p.list(value)) {
        if (item == "SD") cfg.schemes.push_back(ml::SchemeKind::kSubjectDependent);
        else if (item == "SI") cfg.schemes.push_back(ml::SchemeKind::kSubjectIndependent);
        else p.error("unknown scheme '" + std::string(item) + "' (SD, SI)");
      }
    } else if (key == "modalities") {
      cfg.modalities.clear();
      for (auto item : p.list(value)) {
        const auto m = lookup<ModalitySet>(kModalityNames, item);
        if (!m) p.error("unknown modality set '" + std::string(item) + "'");
        cfg.modalities.push_back(*m);
      }
    } else if (key == "population") {
      cfg.populations.clear();
      for (auto item : p.list(value)) {
        const auto pop = lookup<Population>(kPopulationNames, item);
        if (!pop) p.error("unknown population '" + std::string(item) + "' (all, female, male)");
        cfg.populations.push_back(*pop);
      }
    } else if (key == "sa.enabled") {
      cfg.sa_enabled = p.boolean(value);
    } else if (key == "sa.t0") {
      cfg.sa.t0 = p.number(value);
      if (!(cfg.sa.t0 > 0.0)) p.error("sa.t0 must be positive");
    } else if (key == "sa.alpha") {
      cfg.sa.alpha = p.number(value);
      if (!(cfg.sa.alpha > 0.0 && cfg.sa.alpha < 1.0)) p.error("sa.alpha must lie in (0, 1)");
    } else if (key == "sa.iterations") {
      cfg.sa.iterations = p.count(value);
    } else if (key == "hrv.block") {
      if (value == "nn50") cfg.hrv_block = HrvBlock::kNn50;
      else if (value == "full") cfg.hrv_block = HrvBlock::kFull;
      else p.error("hrv.block must be nn50 or full");
    } else if (key == "hrv.tachogram_hz") {
      cfg.tachogram_hz = p.number(value);
      if (!(cfg.tachogram_hz > 0.0)) p.error("hrv.tachogram_hz must be positive");
    } else if (key == "ecg.resample_hz") {
      cfg.ecg_resample_hz = p.number(value);
      if (!(cfg.ecg_resample_hz >= 100.0)) p.error("ecg.resample_hz must be at least 100");
    } else if (key == "eeg.highpass_hz") {
      cfg.eeg_highpass_hz = p.number(value);
    } else if (key == "eeg.lowpass_hz") {
      cfg.eeg_lowpass_hz = p.number(value);
    } else if (key == "eeg.welch_segment_s") {
      cfg.welch.segment_s = p.number(value);
      if (!(cfg.welch.segment_s > 0.0)) p.error("eeg.welch_segment_s must be positive");
    } else if (key == "eeg.welch_overlap") {
      cfg.welch.overlap = p.number(value);
      if (!(cfg.welch.overlap >= 0.0 && cfg.welch.overlap < 1.0)) p.error("eeg.welch_overlap must lie in [0, 1)");
    } else if (key.starts_with("bands.")) {
      const auto band = eeg::parse_band(key.substr(6));
      if (!band) p.error("unknown band '" + std::string(key.substr(6)) + "'");
      const auto edges = p.list(value);
      if (edges.size() != 2) p.error("band edges must be 'lo,hi'");
      auto& def = cfg.montage.bands[static_cast<size_t>(*band)];
      def.lo = p.number(edges[0]);
      def.hi = p.number(edges[1]);
    } else if (key.starts_with("regions.")) {
      const auto region = eeg::parse_region(key.substr(8));
      if (!region) p.error("unknown region '" + std::string(key.substr(8)) + "'");
      auto& def = cfg.montage.regions[static_cast<size_t>(*region)];
      def.electrodes.clear();
      for (auto e : p.list(value)) def.electrodes.emplace_back(e);
    } else {
      p.error("unknown key '" + std::string(key) + "'");
    }
  }
  if (cfg.classifiers.empty() || cfg.schemes.empty() || cfg.modalities.empty() || cfg.populations.empty()) {
    fail(ErrorCode::kSchema, std::string(origin) + ": grid lists must not be empty");
  }
  try {
    cfg.montage.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kSchema, std::string(origin) + ": " + e.what());
  }
  if (!(cfg.eeg_highpass_hz > 0.0 && cfg.eeg_highpass_hz < cfg.eeg_lowpass_hz)) {
    fail(ErrorCode::kSchema, std::string(origin) + ": eeg.highpass_hz must be positive and below eeg.lowpass_hz");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::effective() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto names = [](const auto& items, auto&& name) {
    std::vector<std::string> parts;
    for (const auto& i : items) parts.emplace_back(name(i));
    return join(parts);
  };
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("window_s", format_number(window_s));
  kv.emplace_back("folds", std::to_string(folds));
  kv.emplace_back("k", std::to_string(k));
  kv.emplace_back("classifiers", names(classifiers, [](ml::ClassifierKind c) {
                    return c == ml::ClassifierKind::kKnn ? "KNN" : "QDA";
                  }));
  kv.emplace_back("schemes", names(schemes, [](ml::SchemeKind s) { return ml::to_string(s); }));
  kv.emplace_back("modalities", names(modalities, [](ModalitySet m) { return std::string(to_string(m)); }));
  kv.emplace_back("population", names(populations, [](Population p) { return std::string(to_string(p)); }));
  kv.emplace_back("sa.enabled", sa_enabled ? "true" : "false");
  kv.emplace_back("sa.t0", format_number(sa.t0));
  kv.emplace_back("sa.alpha", format_number(sa.alpha));
  kv.emplace_back("sa.iterations", std::to_string(sa.iterations));
  kv.emplace_back("hrv.block", hrv_block == HrvBlock::kNn50 ? "nn50" : "full");
  kv.emplace_back("hrv.tachogram_hz", format_number(tachogram_hz));
  kv.emplace_back("ecg.resample_hz", format_number(ecg_resample_hz));
  kv.emplace_back("eeg.highpass_hz", format_number(eeg_highpass_hz));
  kv.emplace_back("eeg.lowpass_hz", format_number(eeg_lowpass_hz));
  kv.emplace_back("eeg.welch_segment_s", format_number(welch.segment_s));
  kv.emplace_back("eeg.welch_overlap", format_number(welch.overlap));
  for (const auto& b : montage.bands) {
    kv.emplace_back("bands." + std::string(eeg::name(b.band)), format_number(b.lo) + "," + format_number(b.hi));
  }
  for (const auto& r : montage.regions) {
    kv.emplace_back("regions." + std::string(eeg::name(r.region)), join(r.electrodes));
  }
  return kv;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : effective()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace valence
