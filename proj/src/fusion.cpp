#include "valence/fusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/hrv.hpp"
#include "valence/random.hpp"
#include "valence/stats.hpp"
#include "valence/temperature.hpp"

namespace valence::fusion {

using json = nlohmann::ordered_json;

namespace {

constexpr size_t kNn50Field = 4;
constexpr size_t kFirstFrequencyField = 6;
constexpr size_t kFirstPoincareField = 16;

[[noreturn]] void rethrow_with(const Error& e, const std::string& where) {
  throw Error(e.code(), where + ": " + e.what());
}

hrv::IbiSeries clean_ibi(const TimeSeries& ecg) {
  const auto peaks = hrv::detect_rpeaks(ecg);
  return hrv::correct_artifacts(hrv::ibi_from_peaks(peaks));
}

struct SubjectResult {
  std::vector<WindowRow> windows;
  std::vector<TrialRow> trials;
  std::optional<Exclusion> excluded;
  std::string subject;
};

SubjectResult extract_subject(const io::SubjectData& s, const ExperimentConfig& config) {
  SubjectResult out;
  out.subject = s.meta.id;
  std::vector<std::string> missing;
  if (!s.eeg) missing.push_back("eeg");
  if (!s.ecg) missing.push_back("ecg");
  if (!s.temp) missing.push_back("temperature");
  if (!missing.empty()) {
    std::string reason = "missing";
    for (size_t i = 0; i < missing.size(); ++i) reason += (i ? ", " : " ") + missing[i];
    out.excluded = Exclusion{s.meta.id, reason};
    return out;
  }

  for (const auto& trial : s.trials) {
    const std::string where = s.meta.id + "/" + trial.trial_id;
    TrialRow row{s.meta.id, s.meta.sex, trial.trial_id, trial.label, std::nullopt, 0, {}, {}};
    try {
      const auto t = temperature::temp_trial_feature(*s.temp, trial);
      row.temp_mean = t.mean_temp;
      row.temp_replaced = t.n_outliers_replaced;
      row.hrv = trial_hrv(*s.ecg, trial, config.tachogram_hz, &row.note);
    } catch (const Error& e) {
      rethrow_with(e, where);
    }
    out.trials.push_back(std::move(row));
  }

  std::vector<TrialSpec> labelled;
  for (const auto& t : s.trials) {
    if (t.label != Label::kBaseline) labelled.push_back(t);
  }
  MultiChannelRecording eeg;
  try {
    eeg = preprocess_eeg(*s.eeg, config);
  } catch (const Error& e) {
    rethrow_with(e, s.meta.id + "/eeg");
  }
  std::vector<AlignedWindow> windows;
  try {
    windows = align_modalities(eeg, *s.ecg, *s.temp, labelled, config.window_s, config.ecg_resample_hz);
  } catch (const Error& e) {
    rethrow_with(e, s.meta.id);
  }
  eeg = {};

  // Beats are timed on the ECG-rate copy: the EEG grid can be too coarse for
  // the interval-level artifact rule.
  const TimeSeries ecg_beats = s.ecg->rate == config.ecg_resample_hz ? *s.ecg : resample(*s.ecg, config.ecg_resample_hz);

  std::map<std::string, const TrialRow*> by_trial;
  for (const auto& r : out.trials) by_trial[r.trial_id] = &r;

  for (const auto& w : windows) {
    const std::string where = s.meta.id + "/" + w.trial.trial_id + "/window " + std::to_string(w.window_index);
    WindowRow row;
    row.subject = s.meta.id;
    row.sex = s.meta.sex;
    row.trial_id = w.trial.trial_id;
    row.label = w.trial.label;
    row.window_index = w.window_index;
    try {
      row.eeg = eeg::extract_features(w.eeg, config.montage, config.welch);
      row.temp_mean = temperature::robust_mean(w.temp.samples);
      const double start = w.trial.start + static_cast<double>(w.window_index) * config.window_s;
      const hrv::IbiSeries ibi = clean_ibi(slice(ecg_beats, start, config.window_s));
      const hrv::TimeDomain td = hrv::hrv_time_domain(ibi);
      row.hrv[kNn50Field] = static_cast<double>(td.nn50);
      if (config.hrv_block == HrvBlock::kFull) {
        hrv::HrvFeatures f;
        f.time = td;
        f.nonlinear = hrv::poincare(ibi);
        const auto values = hrv::field_values(f);
        const TrialRow& trial = *by_trial.at(w.trial.trial_id);
        for (size_t i = 0; i < values.size(); ++i) {
          const bool frequency = i >= kFirstFrequencyField && i < kFirstPoincareField;
          const auto& v = frequency ? trial.hrv[i] : values[i];
          row.hrv[i] = v.value_or(0.0);
        }
      }
    } catch (const Error& e) {
      rethrow_with(e, where);
    }
    out.windows.push_back(std::move(row));
  }
  return out;
}

std::vector<double> full_row(const WindowRow& w, HrvBlock block) {
  std::vector<double> row(w.eeg.model.values.begin(), w.eeg.model.values.end());
  row.push_back(w.temp_mean);
  if (block == HrvBlock::kNn50) {
    row.push_back(w.hrv[kNn50Field]);
  } else {
    row.insert(row.end(), w.hrv.begin(), w.hrv.end());
  }
  return row;
}

bool in_population(Sex sex, Population p) {
  return p == Population::kAll || (p == Population::kFemale) == (sex == Sex::kFemale);
}

json test_json(const stats::TestResult& t) {
  return json{{"statistic", t.statistic}, {"p", t.p}, {"n1", t.n1}, {"n2", t.n2}, {"method", t.method}};
}

json maybe_mw(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) return nullptr;
  return test_json(stats::mann_whitney(x, y));
}

json maybe_ks(const std::vector<double>& x) {
  if (x.size() < 3) return nullptr;
  const ZScored z = zscore(x);
  if (z.zero_variance) return nullptr;
  return test_json(stats::ks_normal_test(z.values));
}

json maybe_mean(const std::vector<double>& x) {
  if (x.empty()) return nullptr;
  return mean(x);
}

json cv_json(const ml::EvalReport& r) {
  json units = json::array();
  for (const auto& u : r.per_unit) units.push_back({{"unit", u.unit}, {"f1", u.f1}});
  return json{{"per_unit", units}, {"mean_f1", r.mean_f1}, {"sd_f1", r.sd_f1}};
}

json temperature_section(const FusedDataset& data, Population pop) {
  std::map<Label, std::vector<double>> pooled;
  std::vector<std::string> subjects;
  std::map<std::string, std::map<Label, std::vector<double>>> per_subject;
  std::vector<std::string> trial_order;
  std::map<std::string, std::pair<Label, std::vector<double>>> per_trial;
  for (const auto& t : data.trials) {
    if (!in_population(t.sex, pop) || !t.temp_mean) continue;
    pooled[t.label].push_back(*t.temp_mean);
    if (!per_subject.count(t.subject)) subjects.push_back(t.subject);
    per_subject[t.subject][t.label].push_back(*t.temp_mean);
    if (!per_trial.count(t.trial_id)) trial_order.push_back(t.trial_id);
    auto& slot = per_trial[t.trial_id];
    slot.first = t.label;
    slot.second.push_back(*t.temp_mean);
  }
  const auto& pos = pooled[Label::kPositive];
  const auto& neg = pooled[Label::kNegative];
  const auto& base = pooled[Label::kBaseline];

  json out;
  out["means"] = {{"positive", maybe_mean(pos)}, {"negative", maybe_mean(neg)}, {"baseline", maybe_mean(base)}};
  out["tests"] = {{"positive_vs_negative", maybe_mw(pos, neg)},
                  {"positive_vs_baseline", maybe_mw(pos, base)},
                  {"negative_vs_baseline", maybe_mw(neg, base)}};
  json by_subject = json::array();
  for (const auto& s : subjects) {
    auto& m = per_subject[s];
    by_subject.push_back({{"subject", s}, {"positive_vs_negative", maybe_mw(m[Label::kPositive], m[Label::kNegative])}});
  }
  out["by_subject"] = by_subject;
  std::sort(trial_order.begin(), trial_order.end());
  json by_trial = json::array();
  for (const auto& id : trial_order) {
    const auto& [label, values] = per_trial[id];
    by_trial.push_back({{"trial_id", id},
                        {"label", to_string(label)},
                        {"mean", mean(values)},
                        {"sd", values.size() > 1 ? json(sample_sd(values)) : json(nullptr)},
                        {"n", values.size()}});
  }
  out["by_trial"] = by_trial;
  return out;
}

json hrv_section(const FusedDataset& data, Population pop) {
  json tests = json::array();
  for (size_t f = 0; f < hrv::kFieldNames.size(); ++f) {
    std::vector<double> pos, neg;
    for (const auto& t : data.trials) {
      if (!in_population(t.sex, pop) || !t.hrv[f]) continue;
      if (t.label == Label::kPositive) pos.push_back(*t.hrv[f]);
      if (t.label == Label::kNegative) neg.push_back(*t.hrv[f]);
    }
    tests.push_back({{"field", std::string(hrv::kFieldNames[f])},
                     {"mean_positive", maybe_mean(pos)},
                     {"mean_negative", maybe_mean(neg)},
                     {"positive_vs_negative", maybe_mw(pos, neg)}});
  }
  return tests;
}

json normality_section(const FusedDataset& data, Population pop) {
  json out = json::array();
  std::vector<double> temp;
  for (const auto& t : data.trials) {
    if (in_population(t.sex, pop) && t.label != Label::kBaseline && t.temp_mean) temp.push_back(*t.temp_mean);
  }
  out.push_back({{"variable", "temp_mean"}, {"test", maybe_ks(temp)}});
  for (size_t f = 0; f < hrv::kFieldNames.size(); ++f) {
    std::vector<double> v;
    for (const auto& t : data.trials) {
      if (in_population(t.sex, pop) && t.label != Label::kBaseline && t.hrv[f]) v.push_back(*t.hrv[f]);
    }
    out.push_back({{"variable", "hrv_" + std::string(hrv::kFieldNames[f])}, {"test", maybe_ks(v)}});
  }
  return out;
}

json asymmetry_section(const FusedDataset& data, Population pop) {
  std::vector<eeg::AsymmetryRow> rows;
  for (const auto& w : data.windows) {
    if (in_population(w.sex, pop) && w.label != Label::kBaseline) rows.push_back({w.eeg.asymmetry, w.label});
  }
  const eeg::AsymmetryStats st = eeg::asymmetry_report(rows);
  json out = json::array();
  for (const auto& p : st.pairs) {
    out.push_back({{"pair", p.pair},
                   {"mean_ai_positive", p.mean_ai_positive},
                   {"mean_ai_negative", p.mean_ai_negative},
                   {"n_positive", p.n_positive},
                   {"n_negative", p.n_negative},
                   {"positive_vs_negative", test_json(p.positive_vs_negative)},
                   {"left_vs_right_positive", test_json(p.left_vs_right_positive)},
                   {"left_vs_right_negative", test_json(p.left_vs_right_negative)}});
  }
  return out;
}

}  // namespace

MultiChannelRecording preprocess_eeg(const MultiChannelRecording& raw, const ExperimentConfig& config) {
  MultiChannelRecording rec = raw;
  for (auto& ch : rec.channels) {
    ch = lowpass(highpass(ch, config.eeg_highpass_hz), config.eeg_lowpass_hz);
  }
  return car_rereference(rec);
}

std::array<std::optional<double>, 19> trial_hrv(const TimeSeries& ecg, const TrialSpec& trial, double tachogram_hz,
                                                std::string* note) {
  std::array<std::optional<double>, 19> values{};
  auto explain = [note](const char* what, const Error& e) {
    if (note != nullptr) *note = std::string(what) + ": " + e.what();
  };
  hrv::IbiSeries ibi;
  hrv::HrvFeatures f;
  try {
    ibi = clean_ibi(slice(ecg, trial.start, trial.duration));
    f.time = hrv::hrv_time_domain(ibi);
    f.nonlinear = hrv::poincare(ibi);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kOutOfBounds) throw;
    explain("hrv", e);
    return values;
  }
  try {
    f.frequency = hrv::hrv_frequency_domain(ibi, {tachogram_hz, 40.0});
    return hrv::field_values(f);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooShort) throw;
    explain("hrv frequency", e);
  }
  values = hrv::field_values(f);
  for (size_t i = kFirstFrequencyField; i < kFirstPoincareField; ++i) values[i].reset();
  return values;
}

void parallel_for(size_t count, size_t threads, const std::function<void(size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t n = std::min(std::max<size_t>(threads, 1), count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<AlignedWindow> align_modalities(const MultiChannelRecording& eeg, const TimeSeries& ecg,
                                            const TimeSeries& temp, std::span<const TrialSpec> trials,
                                            double window_s, double ecg_resample_hz) {
  validate(eeg);
  const double rate = eeg.rate();
  const TimeSeries ecg_on_grid = resample(resample(ecg, ecg_resample_hz), rate);
  const TimeSeries temp_on_grid = resample(temp, rate);

  std::vector<AlignedWindow> out;
  for (const auto& seg : segment(eeg, trials, window_s)) {
    const double start = seg.trial.start + static_cast<double>(seg.window_index) * window_s;
    AlignedWindow w;
    w.trial = seg.trial;
    w.window_index = seg.window_index;
    w.eeg = seg.data;
    w.ecg = slice(ecg_on_grid, start, window_s);
    w.temp = slice(temp_on_grid, start, window_s);
    const size_t n = w.eeg.length();
    if (w.ecg.size() != n || w.temp.size() != n) {
      fail(ErrorCode::kOutOfBounds, "trial '" + seg.trial.trial_id + "' is not covered by every modality");
    }
    out.push_back(std::move(w));
  }
  return out;
}

FusedDataset extract_dataset(const io::SubjectSource& source, const ExperimentConfig& config, size_t threads) {
  config.montage.validate();
  std::vector<SubjectResult> results(source.size());
  parallel_for(source.size(), threads, [&](size_t i) { results[i] = extract_subject(source.load(i), config); });

  FusedDataset data;
  for (auto& r : results) {
    if (r.excluded) {
      data.excluded.push_back(*r.excluded);
      continue;
    }
    data.subjects.push_back(r.subject);
    std::move(r.windows.begin(), r.windows.end(), std::back_inserter(data.windows));
    std::move(r.trials.begin(), r.trials.end(), std::back_inserter(data.trials));
  }
  return data;
}

std::vector<std::string> modality_columns(ModalitySet set, HrvBlock block) {
  const bool with_eeg = set != ModalitySet::kTempEcg;
  const bool with_temp = set == ModalitySet::kTempEcg || set == ModalitySet::kEegTemp || set == ModalitySet::kAll;
  const bool with_ecg = set == ModalitySet::kTempEcg || set == ModalitySet::kEegEcg || set == ModalitySet::kAll;
  std::vector<std::string> names;
  if (with_eeg) names = eeg::EegFeatureVector::names();
  if (with_temp) names.push_back("temp_mean");
  if (with_ecg) {
    if (block == HrvBlock::kNn50) {
      names.push_back("nn50");
    } else {
      for (auto f : hrv::kFieldNames) names.push_back("hrv_" + std::string(f));
    }
  }
  return names;
}

ml::FeatureMatrix feature_matrix(const FusedDataset& data, ModalitySet set, HrvBlock block, Population population) {
  ml::FeatureMatrix m;
  m.feature_names = modality_columns(ModalitySet::kAll, block);
  for (const auto& w : data.windows) {
    if (w.label == Label::kBaseline || !in_population(w.sex, population)) continue;
    m.append_row(full_row(w, block), w.label, w.subject, w.sex, w.trial_id);
  }
  if (m.rows() == 0) {
    fail(ErrorCode::kInfeasible, "population '" + std::string(to_string(population)) + "' has no labelled windows");
  }
  if (set == ModalitySet::kAll) return m;
  return m.select_columns(modality_columns(set, block));
}

json run_experiment(const io::SubjectSource& source, const ExperimentConfig& config, const RunOptions& options) {
  return run_experiment(extract_dataset(source, config, options.threads), config, options);
}

json run_experiment(const FusedDataset& data, const ExperimentConfig& config, const RunOptions& options) {
  json report;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  json cfg = json::object();
  for (const auto& [k, v] : config.effective()) cfg[k] = v;
  report["config"] = cfg;
  report["seed"] = config.seed;

  json excluded = json::array();
  for (const auto& e : data.excluded) excluded.push_back({{"subject", e.subject}, {"reason", e.reason}});
  size_t labelled = 0;
  for (const auto& w : data.windows) labelled += w.label != Label::kBaseline;
  report["dataset"] = {{"subjects_used", data.subjects},
                       {"excluded", excluded},
                       {"window_rows", labelled},
                       {"trial_rows", data.trials.size()}};

  struct CellKey {
    Population population;
    ModalitySet modalities;
    ml::ClassifierSpec classifier;
    ml::CvScheme scheme;
  };
  std::vector<CellKey> keys;
  std::map<Population, ml::FeatureMatrix> matrices;
  json populations = json::array();
  for (Population pop : config.populations) {
    matrices.emplace(pop, feature_matrix(data, ModalitySet::kAll, config.hrv_block, pop));
    populations.push_back({{"population", to_string(pop)},
                           {"subjects", matrices.at(pop).subjects().size()},
                           {"rows", matrices.at(pop).rows()},
                           {"asymmetry", asymmetry_section(data, pop)},
                           {"temperature", temperature_section(data, pop)},
                           {"hrv_tests", hrv_section(data, pop)},
                           {"normality", normality_section(data, pop)}});
    for (ModalitySet mod : config.modalities) {
      for (auto kind : config.classifiers) {
        for (auto scheme : config.schemes) {
          keys.push_back({pop, mod, {kind, config.k}, {scheme, config.folds}});
        }
      }
    }
  }
  report["populations"] = populations;

  std::vector<json> cells(keys.size());
  parallel_for(keys.size(), options.threads, [&](size_t i) {
    const CellKey& key = keys[i];
    const ml::FeatureMatrix m =
        matrices.at(key.population).select_columns(modality_columns(key.modalities, config.hrv_block));
    const std::string tag = std::string(to_string(key.population)) + "/" + std::string(to_string(key.modalities)) +
                            "/" + ml::to_string(key.classifier) + "/" + ml::to_string(key.scheme.kind);
    json cell;
    cell["population"] = to_string(key.population);
    cell["modalities"] = to_string(key.modalities);
    cell["classifier"] = ml::to_string(key.classifier);
    cell["scheme"] = ml::to_string(key.scheme.kind);
    cell["n_rows"] = m.rows();
    cell["features"] = m.feature_names;
    try {
      cell["cv"] = cv_json(ml::cross_validate(m, key.scheme, key.classifier, config.seed));
      if (config.sa_enabled) {
        const auto sel = ml::sa_select(m, key.classifier, key.scheme, config.sa, derive_seed(config.seed, "sa:" + tag));
        cell["selection"] = {{"selected", sel.selected},
                             {"best_objective", sel.best_objective},
                             {"baseline_objective", sel.baseline_objective},
                             {"distinct_evaluations", sel.distinct_evaluations},
                             {"cv", cv_json(sel.report)}};
      }
    } catch (const Error& e) {
      rethrow_with(e, "cell " + tag);
    }
    cells[i] = std::move(cell);
  });
  report["cells"] = cells;
  return report;
}

}  // namespace valence::fusion
