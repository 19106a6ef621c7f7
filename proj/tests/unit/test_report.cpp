#include <doctest.h>

#include "valence/error.hpp"
#include "valence/fusion.hpp"
#include "valence/report.hpp"
#include "valence/synth.hpp"

using namespace valence;

namespace {

const nlohmann::ordered_json& bundle() {
  static const nlohmann::ordered_json b = [] {
    auto spec = synth::DatasetSpec::preset_named("paper-shape");
    spec.subjects = 3;
    spec.females = 1;
    spec.eeg_rate = 128.0;
    const synth::SyntheticSource source(spec, 1);
    const auto cfg = ExperimentConfig::parse("classifiers = KNN\nmodalities = EEG,T+ECG\npopulation = all\n");
    return fusion::run_experiment(source, cfg);
  }();
  return b;
}

}  // namespace

TEST_CASE("csv quoting") {
  report::Table t{{"a", "b"}, {{"x,y", "say \"hi\""}}};
  CHECK(t.to_csv() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("tables from a report bundle") {
  const auto& b = bundle();
  const auto temp = report::temperature_by_video(b);
  CHECK(temp.rows.size() == 14);
  for (const auto& r : temp.rows) CHECK(r[2] != "Baseline");
  const auto asym = report::asymmetry_bars(b);
  CHECK(asym.rows.size() == 9);
  CHECK(asym.header.size() == asym.rows[0].size());
  const auto sd = report::f1_bars(b, "SD");
  const auto si = report::f1_bars(b, "SI");
  CHECK(sd.rows.size() == 2);
  CHECK(si.rows.size() == 2);
  CHECK(si.rows[0][5] == "3");
}

TEST_CASE("render_all writes every figure") {
  const auto files = report::render_all(bundle(), true);
  REQUIRE(files.size() == 8);
  CHECK(files[0].first == "fig3_temperature.csv");
  for (const auto& [name, content] : files) {
    CHECK_FALSE(content.empty());
    if (name.ends_with(".svg")) {
      CHECK(content.starts_with("<svg"));
      CHECK(content.find("</svg>") != std::string::npos);
    }
  }
  CHECK(report::render_all(bundle(), false).size() == 4);
}

TEST_CASE("svg escapes text") {
  report::BarChart c;
  c.title = "a < b & c";
  c.groups = {"g"};
  c.series = {"s"};
  c.values = {{0.5}};
  c.reference = 0.5;
  const auto svg = report::render_svg(c);
  CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
}

TEST_CASE("non-report input is a schema error") {
  try {
    report::f1_bars(nlohmann::ordered_json::object(), "SD");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchema);
  }
}
