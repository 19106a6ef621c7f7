#include "valence/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "valence/error.hpp"
#include "valence/text.hpp"

namespace valence::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const fs::path& file, size_t line, const std::string& what) {
  fail(ErrorCode::kSchema, file.string() + (line ? ":" + std::to_string(line) : "") + ": " + what);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

NumericTable read_numeric_csv(const fs::path& path) {
  const std::string text = read_text(path);
  NumericTable table;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(trim(f));
      table.columns.resize(table.header.size());
      continue;
    }
    if (fields.size() != table.header.size()) {
      schema_error(path, line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    for (size_t j = 0; j < fields.size(); ++j) {
      const auto v = parse_double(fields[j]);
      if (!v || !std::isfinite(*v)) {
        schema_error(path, line_no, "column '" + table.header[j] + "' holds a non-numeric value '" +
                                        std::string(fields[j]) + "'");
      }
      table.columns[j].push_back(*v);
    }
  }
  if (table.header.empty()) schema_error(path, 0, "missing header row");
  if (table.columns.front().empty()) schema_error(path, 0, "no data rows");
  return table;
}

// Checks the t_s column against the declared rate; returns t0.
double check_time_axis(const fs::path& path, const std::vector<double>& t, double rate) {
  const double tol = 0.01 / rate;
  for (size_t i = 0; i < t.size(); ++i) {
    const double expected = t.front() + static_cast<double>(i) / rate;
    if (std::abs(t[i] - expected) > tol) {
      schema_error(path, i + 2, "t_s is not uniform at the declared rate " + format_number(rate) + " Hz");
    }
  }
  return t.front();
}

TimeSeries single_channel(const fs::path& path, const std::string& value_column, double rate, Unit unit) {
  const NumericTable table = read_numeric_csv(path);
  if (table.header.size() != 2 || table.header[0] != "t_s" || table.header[1] != value_column) {
    schema_error(path, 1, "header must be 't_s," + value_column + "'");
  }
  TimeSeries ts;
  ts.rate = rate;
  ts.t0 = check_time_axis(path, table.columns[0], rate);
  ts.unit = unit;
  ts.label = value_column;
  ts.samples = table.columns[1];
  return ts;
}

std::string csv_signal(const std::vector<std::string>& labels, const std::vector<const TimeSeries*>& channels) {
  std::string out = "t_s";
  for (const auto& l : labels) out += "," + l;
  out += "\n";
  const TimeSeries& first = *channels.front();
  out.reserve(out.size() + first.size() * (12 + 9 * channels.size()));
  for (size_t i = 0; i < first.size(); ++i) {
    out += format_number(first.t0 + static_cast<double>(i) / first.rate, 10);
    for (const auto* ch : channels) {
      out += ',';
      out += format_number(ch->samples[i], 6);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) fail(ErrorCode::kIo, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot move '" + tmp.string() + "' into place");
  }
}

SubjectData read_subject(const fs::path& dir, std::vector<std::string>* warnings) {
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) schema_error(meta_path, 0, "missing meta.json");
  json meta;
  try {
    meta = json::parse(read_text(meta_path));
  } catch (const json::parse_error& e) {
    schema_error(meta_path, 0, std::string("invalid JSON: ") + e.what());
  }

  SubjectData s;
  try {
    s.meta.id = meta.at("id").get<std::string>();
    const auto sex = parse_sex(meta.at("sex").get<std::string>());
    if (!sex) schema_error(meta_path, 0, "sex must be 'female' or 'male'");
    s.meta.sex = *sex;
    if (meta.contains("age") && !meta["age"].is_null()) s.meta.age = meta["age"].get<double>();
  } catch (const json::exception& e) {
    schema_error(meta_path, 0, std::string("bad field: ") + e.what());
  }
  if (s.meta.id.empty()) schema_error(meta_path, 0, "id must be non-empty");
  const json rates = meta.value("rates", json::object());
  auto rate_of = [&](const char* key) -> double {
    if (!rates.contains(key) || !rates[key].is_number()) {
      schema_error(meta_path, 0, std::string("rates.") + key + " missing for an existing file");
    }
    const double r = rates[key].get<double>();
    if (!(r > 0.0)) schema_error(meta_path, 0, std::string("rates.") + key + " must be positive");
    return r;
  };
  auto note = [&](const std::string& w) {
    if (warnings != nullptr) warnings->push_back(dir.filename().string() + ": " + w);
  };

  if (const fs::path p = dir / "eeg.csv"; fs::exists(p)) {
    const double rate = rate_of("eeg");
    const NumericTable table = read_numeric_csv(p);
    if (table.header.size() < 3 || table.header[0] != "t_s") {
      schema_error(p, 1, "header must be 't_s,<electrode labels...>' with at least two electrodes");
    }
    MultiChannelRecording rec;
    rec.subject = s.meta;
    rec.modality = Modality::kEeg;
    const double t0 = check_time_axis(p, table.columns[0], rate);
    std::set<std::string> seen;
    for (size_t j = 1; j < table.header.size(); ++j) {
      if (!seen.insert(table.header[j]).second) schema_error(p, 1, "duplicate electrode '" + table.header[j] + "'");
      rec.channels.push_back({table.columns[j], rate, t0, Unit::kMicrovolt, table.header[j]});
    }
    s.eeg = std::move(rec);
  } else {
    note("eeg.csv missing");
  }
  if (const fs::path p = dir / "ecg.csv"; fs::exists(p)) {
    s.ecg = single_channel(p, "ecg_mv", rate_of("ecg"), Unit::kMillivolt);
  } else {
    note("ecg.csv missing");
  }
  if (const fs::path p = dir / "temp.csv"; fs::exists(p)) {
    s.temp = single_channel(p, "temp_c", rate_of("temp"), Unit::kCelsius);
  } else {
    note("temp.csv missing");
  }

  const fs::path trials_path = dir / "trials.csv";
  if (!fs::exists(trials_path)) schema_error(trials_path, 0, "missing trials.csv");
  const std::string text = read_text(trials_path);
  size_t line_no = 0;
  bool header_seen = false;
  std::set<std::string> ids;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (!header_seen) {
      if (f.size() != 4 || trim(f[0]) != "trial_id" || trim(f[1]) != "start_s" || trim(f[2]) != "duration_s" ||
          trim(f[3]) != "label") {
        schema_error(trials_path, line_no, "header must be 'trial_id,start_s,duration_s,label'");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 4) schema_error(trials_path, line_no, "expected 4 fields");
    TrialSpec t;
    t.trial_id = std::string(trim(f[0]));
    const auto start = parse_double(f[1]);
    const auto duration = parse_double(f[2]);
    const auto label = parse_label(trim(f[3]));
    if (t.trial_id.empty() || !ids.insert(t.trial_id).second) {
      schema_error(trials_path, line_no, "trial_id must be non-empty and unique");
    }
    if (!start || *start < 0.0) schema_error(trials_path, line_no, "start_s must be a non-negative number");
    if (!duration || *duration <= 0.0) schema_error(trials_path, line_no, "duration_s must be positive");
    if (!label) schema_error(trials_path, line_no, "label must be Positive, Negative or Baseline");
    t.start = *start;
    t.duration = *duration;
    t.label = *label;
    s.trials.push_back(std::move(t));
  }
  if (s.trials.empty()) schema_error(trials_path, 0, "no trials");
  return s;
}

void write_subject(const fs::path& dir, const SubjectData& subject) {
  fs::create_directories(dir);
  json rates = json::object();
  if (subject.eeg) {
    std::vector<std::string> labels;
    std::vector<const TimeSeries*> channels;
    for (const auto& ch : subject.eeg->channels) {
      labels.push_back(ch.label);
      channels.push_back(&ch);
    }
    write_file_atomic(dir / "eeg.csv", csv_signal(labels, channels));
    rates["eeg"] = subject.eeg->rate();
  }
  if (subject.ecg) {
    write_file_atomic(dir / "ecg.csv", csv_signal({"ecg_mv"}, {&*subject.ecg}));
    rates["ecg"] = subject.ecg->rate;
  }
  if (subject.temp) {
    write_file_atomic(dir / "temp.csv", csv_signal({"temp_c"}, {&*subject.temp}));
    rates["temp"] = subject.temp->rate;
  }
  std::string trials = "trial_id,start_s,duration_s,label\n";
  for (const auto& t : subject.trials) {
    trials += t.trial_id + "," + format_number(t.start) + "," + format_number(t.duration) + "," +
              to_string(t.label) + "\n";
  }
  write_file_atomic(dir / "trials.csv", trials);

  json meta;
  meta["id"] = subject.meta.id;
  meta["sex"] = to_string(subject.meta.sex);
  meta["age"] = subject.meta.age ? json(*subject.meta.age) : json(nullptr);
  meta["rates"] = rates;
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

DirectorySource::DirectorySource(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) fail(ErrorCode::kIo, "dataset directory '" + root_.string() + "' not found");
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) {
      subjects_.push_back(entry.path().filename().string());
    }
  }
  std::sort(subjects_.begin(), subjects_.end());
  if (subjects_.empty()) fail(ErrorCode::kSchema, root_.string() + ": no subject directories with meta.json");
}

SubjectData DirectorySource::load(size_t index) const { return read_subject(root_ / subjects_.at(index)); }

ValidationReport validate_dataset(const fs::path& root) {
  ValidationReport report;
  std::vector<std::string> dirs;
  if (!fs::is_directory(root)) {
    report.errors.push_back(root.string() + ": not a directory");
    return report;
  }
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path().filename().string());
  }
  std::sort(dirs.begin(), dirs.end());
  std::set<std::string> ids;
  for (const auto& d : dirs) {
    try {
      const SubjectData s = read_subject(root / d, &report.warnings);
      ++report.subjects;
      if (!ids.insert(s.meta.id).second) report.errors.push_back(d + ": duplicate subject id '" + s.meta.id + "'");
      if (s.meta.id != d) report.warnings.push_back(d + ": meta id '" + s.meta.id + "' differs from directory name");
      auto covers = [&](const char* what, double t0, double end) {
        for (const auto& t : s.trials) {
          if (t.start < t0 - 1e-9 || t.start + t.duration > end + 1e-9) {
            report.errors.push_back(d + ": trial '" + t.trial_id + "' extends outside " + what);
          }
        }
      };
      if (s.eeg) {
        validate(*s.eeg);
        covers("eeg.csv", s.eeg->channels.front().t0, s.eeg->channels.front().end_time());
      }
      if (s.ecg) covers("ecg.csv", s.ecg->t0, s.ecg->end_time());
      if (s.temp) {
        covers("temp.csv", s.temp->t0, s.temp->end_time());
        for (double v : s.temp->samples) {
          if (v < 0.0 || v > 50.0) {
            report.warnings.push_back(d + ": temperature sample " + format_number(v) + " C outside [0, 50]");
            break;
          }
        }
      }
      std::vector<TrialSpec> sorted = s.trials;
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
      for (size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start < sorted[i - 1].start + sorted[i - 1].duration - 1e-9) {
          report.warnings.push_back(d + ": trials '" + sorted[i - 1].trial_id + "' and '" + sorted[i].trial_id +
                                    "' overlap");
        }
      }
    } catch (const Error& e) {
      report.errors.push_back(e.what());
    }
  }
  if (dirs.empty()) report.errors.push_back(root.string() + ": no subject directories");
  return report;
}

}  // namespace valence::io
