#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "valence/config.hpp"
#include "valence/dataset.hpp"
#include "valence/eeg.hpp"
#include "valence/error.hpp"
#include "valence/fusion.hpp"
#include "valence/hrv.hpp"
#include "valence/random.hpp"
#include "valence/report.hpp"
#include "valence/selection.hpp"
#include "valence/synth.hpp"
#include "valence/temperature.hpp"
#include "valence/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace valence;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidArgument:
      return 2;
    case ErrorCode::kNumerical:
      return 4;
    default:
      return 3;
  }
}

void emit(const std::optional<fs::path>& out, const std::string& content) {
  if (out) {
    if (out->has_parent_path()) fs::create_directories(out->parent_path());
    io::write_file_atomic(*out, content);
  } else {
    std::cout << content;
  }
}

ExperimentConfig load_config(const std::optional<fs::path>& path) {
  return path ? ExperimentConfig::load(*path) : ExperimentConfig{};
}

size_t subject_index(const io::DirectorySource& src, const std::string& subject) {
  for (size_t i = 0; i < src.size(); ++i) {
    if (src.id(i) == subject) return i;
  }
  fail(ErrorCode::kSchema, "subject '" + subject + "' not found");
}

std::vector<size_t> chosen_subjects(const io::DirectorySource& src, const std::optional<std::string>& subject) {
  if (subject) return {subject_index(src, *subject)};
  std::vector<size_t> all(src.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

template <typename E>
E parse_enum(const std::string& text, std::initializer_list<E> values, const char* what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  fail(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal valence pipeline: EEG, ECG/HRV and skin temperature"};
  app.set_version_flag("--version", std::string(fusion::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();  // lets --threads follow the subcommand
  size_t threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  std::string preset = "paper-shape";
  std::uint64_t synth_seed = 1;
  fs::path synth_out;
  bool force = false;
  std::optional<size_t> n_subjects, n_females;
  std::optional<double> eeg_scale, eeg_rate, snr_db;
  synth_cmd->add_option("--preset", preset, "paper-shape | paper-means | null | sex-temp")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--subjects", n_subjects);
  synth_cmd->add_option("--females", n_females);
  synth_cmd->add_option("--eeg-effect", eeg_scale, "Scale of the EEG class effects");
  synth_cmd->add_option("--eeg-rate", eeg_rate);
  synth_cmd->add_option("--snr-db", snr_db, "ECG signal-to-noise ratio");
  synth_cmd->add_flag("--force", force, "Replace an existing output directory");

  // ingest-validate
  auto* validate_cmd = app.add_subcommand("ingest-validate", "Check a dataset directory against the schema");
  fs::path data_dir;
  bool as_json = false;
  validate_cmd->add_option("--data", data_dir)->required();
  validate_cmd->add_flag("--json", as_json, "Print the report as JSON");

  // hrv
  auto* hrv_cmd = app.add_subcommand("hrv", "HRV variables per trial (CSV)");
  std::optional<std::string> subject, trial;
  std::optional<fs::path> out, config_path;
  hrv_cmd->add_option("--data", data_dir)->required();
  hrv_cmd->add_option("--subject", subject);
  hrv_cmd->add_option("--trial", trial);
  hrv_cmd->add_option("--config", config_path);
  hrv_cmd->add_option("--out", out);

  // eeg-features
  auto* eeg_cmd = app.add_subcommand("eeg-features", "EEG band powers and asymmetry indices per window (CSV)");
  eeg_cmd->add_option("--data", data_dir)->required();
  eeg_cmd->add_option("--subject", subject);
  eeg_cmd->add_option("--config", config_path);
  eeg_cmd->add_option("--out", out);

  // temp-features
  auto* temp_cmd = app.add_subcommand("temp-features", "Mean skin temperature per trial (CSV)");
  temp_cmd->add_option("--data", data_dir)->required();
  temp_cmd->add_option("--subject", subject);
  temp_cmd->add_option("--out", out);

  // asymmetry
  auto* asym_cmd = app.add_subcommand("asymmetry", "Asymmetry index statistics over all subjects (CSV)");
  asym_cmd->add_option("--data", data_dir)->required();
  asym_cmd->add_option("--config", config_path);
  asym_cmd->add_option("--out", out);

  // select
  auto* select_cmd = app.add_subcommand("select", "Simulated-annealing feature selection (JSON)");
  std::string sel_classifier = "KNN", sel_scheme = "SD", sel_modalities = "ALL", sel_population = "all";
  select_cmd->add_option("--data", data_dir)->required();
  select_cmd->add_option("--config", config_path);
  select_cmd->add_option("--classifier", sel_classifier, "KNN | QDA")->capture_default_str();
  select_cmd->add_option("--scheme", sel_scheme, "SD | SI")->capture_default_str();
  select_cmd->add_option("--modalities", sel_modalities, "EEG | T+ECG | EEG+T | EEG+ECG | ALL")->capture_default_str();
  select_cmd->add_option("--population", sel_population, "all | female | male")->capture_default_str();
  select_cmd->add_option("--out", out);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Run the experiment grid and write the report bundle (JSON)");
  std::optional<std::uint64_t> seed_override;
  classify_cmd->add_option("--data", data_dir)->required();
  classify_cmd->add_option("--config", config_path);
  classify_cmd->add_option("--seed", seed_override, "Override the config seed");
  classify_cmd->add_option("--out", out);

  // report
  auto* report_cmd = app.add_subcommand("report", "Plot tables (CSV, optional SVG) from a classify report");
  fs::path report_in, report_dir;
  bool svg = false;
  report_cmd->add_option("--in", report_in)->required();
  report_cmd->add_option("--out", report_dir)->required();
  report_cmd->add_flag("--svg", svg, "Also render SVG bar charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      auto spec = synth::DatasetSpec::preset_named(preset);
      if (n_subjects) spec.subjects = *n_subjects;
      if (n_females) spec.females = *n_females;
      if (spec.females > spec.subjects) spec.females = spec.subjects / 3;
      if (eeg_scale) spec.eeg_effect_scale = *eeg_scale;
      if (eeg_rate) spec.eeg_rate = *eeg_rate;
      if (snr_db) spec.hrv.ecg_snr_db = *snr_db;
      synth::write_dataset(synth_out, spec, synth_seed, threads, force);
      std::cerr << "wrote " << spec.subjects << " subjects to " << synth_out.string() << "\n";
    } else if (validate_cmd->parsed()) {
      const auto rep = io::validate_dataset(data_dir);
      if (as_json) {
        std::cout << json{{"subjects", rep.subjects}, {"errors", rep.errors}, {"warnings", rep.warnings}}.dump(2)
                  << "\n";
      } else {
        for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
        for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
        std::cout << rep.subjects << " subjects, " << rep.errors.size() << " errors, " << rep.warnings.size()
                  << " warnings\n";
      }
      return rep.errors.empty() ? 0 : 2;
    } else if (hrv_cmd->parsed()) {
      const auto cfg = load_config(config_path);
      const io::DirectorySource src(data_dir);
      std::string csv = "subject,trial_id,label";
      for (auto f : hrv::kFieldNames) csv += "," + std::string(f);
      csv += "\n";
      bool found = false;
      for (size_t i : chosen_subjects(src, subject)) {
        const auto s = src.load(i);
        if (!s.ecg) fail(ErrorCode::kSchema, s.meta.id + ": no ecg.csv");
        for (const auto& t : s.trials) {
          if (trial && t.trial_id != *trial) continue;
          found = true;
          const auto values = fusion::trial_hrv(*s.ecg, t, cfg.tachogram_hz);
          csv += s.meta.id + "," + t.trial_id + "," + to_string(t.label);
          for (const auto& v : values) csv += "," + opt_num(v);
          csv += "\n";
        }
      }
      if (trial && !found) fail(ErrorCode::kSchema, "trial '" + *trial + "' not found");
      emit(out, csv);
    } else if (eeg_cmd->parsed()) {
      const auto cfg = load_config(config_path);
      cfg.montage.validate();
      const io::DirectorySource src(data_dir);
      std::string csv = "subject,trial_id,label,window";
      for (const auto& n : eeg::EegFeatureVector::names()) csv += "," + n;
      for (const auto& p : eeg::kAsymmetryPairs) csv += ",AI_" + eeg::pair_name(p);
      csv += "\n";
      for (size_t i : chosen_subjects(src, subject)) {
        const auto s = src.load(i);
        if (!s.eeg) fail(ErrorCode::kSchema, s.meta.id + ": no eeg.csv");
        const auto rec = fusion::preprocess_eeg(*s.eeg, cfg);
        for (const auto& seg : segment(rec, s.trials, cfg.window_s)) {
          const auto f = eeg::extract_features(seg.data, cfg.montage, cfg.welch);
          csv += s.meta.id + "," + seg.trial.trial_id + "," + to_string(seg.trial.label) + "," +
                 std::to_string(seg.window_index);
          for (double v : f.model.values) csv += "," + format_number(v);
          for (size_t k = 0; k < eeg::kAsymmetryPairs.size(); ++k) {
            csv += "," + opt_num(eeg::asymmetry_index(f.asymmetry.right[k], f.asymmetry.left[k]));
          }
          csv += "\n";
        }
      }
      emit(out, csv);
    } else if (temp_cmd->parsed()) {
      const io::DirectorySource src(data_dir);
      std::string csv = "subject,trial_id,label,mean_temp,n_outliers_replaced\n";
      for (size_t i : chosen_subjects(src, subject)) {
        const auto s = src.load(i);
        if (!s.temp) fail(ErrorCode::kSchema, s.meta.id + ": no temp.csv");
        for (const auto& t : s.trials) {
          const auto f = temperature::temp_trial_feature(*s.temp, t);
          csv += s.meta.id + "," + t.trial_id + "," + to_string(t.label) + "," + format_number(f.mean_temp) + "," +
                 std::to_string(f.n_outliers_replaced) + "\n";
        }
      }
      emit(out, csv);
    } else if (asym_cmd->parsed()) {
      const auto cfg = load_config(config_path);
      cfg.montage.validate();
      const io::DirectorySource src(data_dir);
      std::vector<std::vector<eeg::AsymmetryRow>> per_subject(src.size());
      fusion::parallel_for(src.size(), threads, [&](size_t i) {
        const auto s = src.load(i);
        if (!s.eeg) return;
        std::vector<TrialSpec> labelled;
        for (const auto& t : s.trials) {
          if (t.label != Label::kBaseline) labelled.push_back(t);
        }
        const auto rec = fusion::preprocess_eeg(*s.eeg, cfg);
        for (const auto& seg : segment(rec, labelled, cfg.window_s)) {
          per_subject[i].push_back({eeg::extract_features(seg.data, cfg.montage, cfg.welch).asymmetry, seg.trial.label});
        }
      });
      std::vector<eeg::AsymmetryRow> rows;
      for (auto& v : per_subject) rows.insert(rows.end(), v.begin(), v.end());
      const auto st = eeg::asymmetry_report(rows);
      std::string csv =
          "pair,mean_ai_positive,mean_ai_negative,n_positive,n_negative,p_positive_vs_negative,"
          "p_left_vs_right_positive,p_left_vs_right_negative\n";
      for (const auto& p : st.pairs) {
        csv += p.pair + "," + format_number(p.mean_ai_positive) + "," + format_number(p.mean_ai_negative) + "," +
               std::to_string(p.n_positive) + "," + std::to_string(p.n_negative) + "," +
               format_number(p.positive_vs_negative.p) + "," + format_number(p.left_vs_right_positive.p) + "," +
               format_number(p.left_vs_right_negative.p) + "\n";
      }
      emit(out, csv);
    } else if (select_cmd->parsed()) {
      const auto cfg = load_config(config_path);
      const io::DirectorySource src(data_dir);
      const auto data = fusion::extract_dataset(src, cfg, threads);
      const auto mod = parse_enum(sel_modalities, {ModalitySet::kEeg, ModalitySet::kTempEcg, ModalitySet::kEegTemp,
                                                   ModalitySet::kEegEcg, ModalitySet::kAll}, "modality set");
      const auto pop = parse_enum(sel_population, {Population::kAll, Population::kFemale, Population::kMale},
                                  "population");
      ml::ClassifierSpec clf{ml::ClassifierKind::kKnn, cfg.k};
      if (sel_classifier == "QDA") {
        clf.kind = ml::ClassifierKind::kQda;
      } else if (sel_classifier != "KNN") {
        fail(ErrorCode::kInvalidArgument, "unknown classifier '" + sel_classifier + "'");
      }
      ml::CvScheme scheme{ml::SchemeKind::kSubjectDependent, cfg.folds};
      if (sel_scheme == "SI") {
        scheme.kind = ml::SchemeKind::kSubjectIndependent;
      } else if (sel_scheme != "SD") {
        fail(ErrorCode::kInvalidArgument, "unknown scheme '" + sel_scheme + "'");
      }
      const auto m = fusion::feature_matrix(data, mod, cfg.hrv_block, pop);
      const auto sel = ml::sa_select(m, clf, scheme, cfg.sa, derive_seed(cfg.seed, "select"));
      json cfg_json = json::object();
      for (const auto& [k, v] : cfg.effective()) cfg_json[k] = v;
      json units = json::array();
      for (const auto& u : sel.report.per_unit) units.push_back({{"unit", u.unit}, {"f1", u.f1}});
      const json result = {{"tool", {{"name", fusion::kToolName}, {"version", fusion::kToolVersion}}},
                           {"config", cfg_json},
                           {"seed", cfg.seed},
                           {"population", sel_population},
                           {"modalities", sel_modalities},
                           {"classifier", ml::to_string(clf)},
                           {"scheme", ml::to_string(scheme.kind)},
                           {"features", m.feature_names},
                           {"mask", sel.mask},
                           {"selected", sel.selected},
                           {"best_objective", sel.best_objective},
                           {"baseline_objective", sel.baseline_objective},
                           {"distinct_evaluations", sel.distinct_evaluations},
                           {"cv", {{"per_unit", units}, {"mean_f1", sel.report.mean_f1}, {"sd_f1", sel.report.sd_f1}}}};
      emit(out, result.dump(2) + "\n");
    } else if (classify_cmd->parsed()) {
      auto cfg = load_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      const io::DirectorySource src(data_dir);
      const json bundle = fusion::run_experiment(src, cfg, {threads});
      for (const auto& e : bundle["dataset"]["excluded"]) {
        std::cerr << "excluded " << e["subject"].get<std::string>() << ": " << e["reason"].get<std::string>() << "\n";
      }
      emit(out, bundle.dump(2) + "\n");
    } else if (report_cmd->parsed()) {
      json bundle;
      try {
        std::ifstream in(report_in);
        if (!in) fail(ErrorCode::kIo, "cannot open '" + report_in.string() + "'");
        bundle = json::parse(in);
      } catch (const json::parse_error& e) {
        fail(ErrorCode::kSchema, report_in.string() + ": " + e.what());
      }
      fs::create_directories(report_dir);
      for (const auto& [name, content] : report::render_all(bundle, svg)) {
        io::write_file_atomic(report_dir / name, content);
      }
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << json{{"error", "schema"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 4;
  }
  return 0;
}
