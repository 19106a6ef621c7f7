#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "valence/dataset.hpp"
#include "valence/error.hpp"
#include "valence/synth.hpp"

using namespace valence;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("valence_unit_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

io::SubjectData small_subject() {
  io::SubjectData s;
  s.meta = {"S01", Sex::kFemale, 23.0};
  MultiChannelRecording rec;
  for (const char* label : {"Fp1", "Fp2", "Cz"}) {
    TimeSeries ts{{}, 64.0, 0.0, Unit::kMicrovolt, label};
    for (int i = 0; i < 640; ++i) ts.samples.push_back(std::sin(0.1 * i) * 12.345678 + label[1]);
    rec.channels.push_back(ts);
  }
  s.eeg = rec;
  s.ecg = TimeSeries{std::vector<double>(2560, 0.25), 256.0, 0.0, Unit::kMillivolt, "ecg"};
  s.temp = TimeSeries{std::vector<double>(10, 28.75), 1.0, 0.0, Unit::kCelsius, "temp"};
  s.trials = {{0.5, 4.0, Label::kPositive, "v01"}, {5.0, 4.5, Label::kBaseline, "b01"}};
  return s;
}

std::string expect_schema(const fs::path& dir) {
  try {
    io::read_subject(dir);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchema);
    return e.what();
  }
  FAIL("expected a schema error");
  return {};
}

}  // namespace

TEST_CASE("subject round trip through disk") {
  TempDir tmp;
  const auto s = small_subject();
  io::write_subject(tmp.path / "S01", s);
  std::vector<std::string> warnings;
  const auto r = io::read_subject(tmp.path / "S01", &warnings);
  CHECK(warnings.empty());
  CHECK(r.meta.id == "S01");
  CHECK(r.meta.sex == Sex::kFemale);
  CHECK(*r.meta.age == 23.0);
  REQUIRE(r.eeg.has_value());
  CHECK(r.eeg->channels.size() == 3);
  CHECK(r.eeg->channels[2].label == "Cz");
  CHECK(r.eeg->rate() == 64.0);
  for (size_t i = 0; i < 640; ++i) {
    CHECK(r.eeg->channels[0].samples[i] == doctest::Approx(s.eeg->channels[0].samples[i]).epsilon(1e-5));
  }
  CHECK(r.ecg->size() == 2560);
  CHECK(r.temp->samples[3] == 28.75);
  REQUIRE(r.trials.size() == 2);
  CHECK(r.trials[1].trial_id == "b01");
  CHECK(r.trials[1].duration == 4.5);
  CHECK(r.trials[0].label == Label::kPositive);
  for (const auto& e : fs::recursive_directory_iterator(tmp.path)) {
    CHECK(e.path().extension() != ".tmp");
  }
}

TEST_CASE("missing modality files are warnings, not errors") {
  TempDir tmp;
  auto s = small_subject();
  s.ecg.reset();
  io::write_subject(tmp.path / "S01", s);
  std::vector<std::string> warnings;
  const auto r = io::read_subject(tmp.path / "S01", &warnings);
  CHECK_FALSE(r.ecg.has_value());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("ecg.csv") != std::string::npos);
}

TEST_CASE("schema errors carry file and line") {
  TempDir tmp;
  const fs::path dir = tmp.path / "S01";
  io::write_subject(dir, small_subject());

  write_text(dir / "trials.csv", "trial_id,start_s,duration_s,label\nv01,0.5,4,Positive\nv02,1,2,Happy\n");
  CHECK(expect_schema(dir).find("trials.csv:3:") != std::string::npos);

  write_text(dir / "trials.csv", "trial_id,start_s,duration_s,label\nv01,0.5,4,Positive\nv01,1,2,Negative\n");
  CHECK(expect_schema(dir).find("trials.csv:3:") != std::string::npos);

  write_text(dir / "trials.csv", "trial_id,start_s,duration_s,label\nv01,-1,4,Positive\n");
  CHECK(expect_schema(dir).find("trials.csv:2:") != std::string::npos);

  write_text(dir / "trials.csv", "trial_id,start_s,duration_s,label\nv01,0.5,4,Positive\n");
  write_text(dir / "temp.csv", "t_s,temp_c\n0,28\n1,abc\n2,28\n");
  CHECK(expect_schema(dir).find("temp.csv:3:") != std::string::npos);

  write_text(dir / "temp.csv", "t_s,temp_c\n0,28\n1,28\n2.5,28\n");
  CHECK(expect_schema(dir).find("temp.csv") != std::string::npos);

  write_text(dir / "temp.csv", "t_s,temp_c\n0,28\n1,28\n");
  write_text(dir / "eeg.csv", "t_s,Fp1,Fp1\n0,1,2\n");
  CHECK(expect_schema(dir).find("eeg.csv:1:") != std::string::npos);

  fs::remove(dir / "eeg.csv");
  write_text(dir / "meta.json", "{\"id\": \"S01\", \"sex\": \"other\", \"rates\": {\"ecg\": 256, \"temp\": 1}}");
  CHECK(expect_schema(dir).find("meta.json") != std::string::npos);

  write_text(dir / "meta.json", "{\"id\": \"S01\", \"sex\": \"male\", \"rates\": {\"ecg\": 256}}");
  CHECK(expect_schema(dir).find("rates.temp") != std::string::npos);
}

TEST_CASE("validate flags trials outside the recording") {
  TempDir tmp;
  auto s = small_subject();
  s.trials.push_back({8.0, 5.0, Label::kNegative, "v08"});
  io::write_subject(tmp.path / "S01", s);
  const auto report = io::validate_dataset(tmp.path);
  CHECK(report.subjects == 1);
  CHECK_FALSE(report.errors.empty());
}

TEST_CASE("a synthetic dataset validates cleanly and leaves no temp files") {
  TempDir tmp;
  auto spec = synth::DatasetSpec::preset_named("paper-shape");
  spec.subjects = 2;
  spec.females = 1;
  spec.eeg_rate = 128.0;
  const fs::path out = tmp.path / "data";
  synth::write_dataset(out, spec, 3, 1);
  const auto report = io::validate_dataset(out);
  CHECK(report.subjects == 2);
  CHECK(report.errors.empty());
  CHECK(report.warnings.empty());
  CHECK(fs::exists(out / "ground_truth.json"));
  CHECK_FALSE(fs::exists(tmp.path / "data.partial"));
  for (const auto& e : fs::recursive_directory_iterator(out)) CHECK(e.path().extension() != ".tmp");

  try {
    synth::write_dataset(out, spec, 3, 1);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  synth::write_dataset(out, spec, 3, 1, true);
  CHECK(io::DirectorySource(out).size() == 2);
}
