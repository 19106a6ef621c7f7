#include <doctest.h>

#include <cmath>
#include <random>

#include "valence/error.hpp"
#include "valence/hrv.hpp"
#include "valence/synth.hpp"

using namespace valence;

namespace {

hrv::IbiSeries from_intervals(const std::vector<double>& rr, double t0 = 0.0) {
  std::vector<double> beats = {t0};
  for (double r : rr) beats.push_back(beats.back() + r / 1000.0);
  return hrv::ibi_from_peaks(beats);
}

double pop_var(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= double(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size());
}

}  // namespace

TEST_CASE("time-domain hand oracle") {
  const auto td = hrv::hrv_time_domain(from_intervals({800, 850, 790, 905, 800}));
  CHECK(td.mean_rr == doctest::Approx(829.0));
  CHECK(td.median_rr == doctest::Approx(800.0));
  CHECK(td.sdnn == doctest::Approx(48.528).epsilon(2e-5));
  CHECK(td.rmssd == doctest::Approx(87.107).epsilon(2e-5));
  CHECK(td.nn50 == 3);
  CHECK(td.pnn50 == doctest::Approx(75.0));
}

TEST_CASE("a successive difference of exactly 50 ms is not counted") {
  const auto td = hrv::hrv_time_domain(from_intervals({800, 850, 800, 851}));
  CHECK(td.nn50 == 1);
}

TEST_CASE("constant series has zero variability") {
  const auto ibi = from_intervals(std::vector<double>(40, 750.0));
  const auto td = hrv::hrv_time_domain(ibi);
  CHECK(td.sdnn == doctest::Approx(0.0));
  CHECK(td.rmssd == doctest::Approx(0.0));
  const auto p = hrv::poincare(ibi);
  CHECK(p.sd1 == doctest::Approx(0.0));
  CHECK_FALSE(p.sd1_sd2.has_value());
}

TEST_CASE("Poincare total variance equals the pair-cloud marginal variances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(3, 2000);
  std::normal_distribution<double> g(0, 40);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> rr(static_cast<size_t>(len(rng)));
    for (double& r : rr) r = 800 + g(rng);
    const auto p = hrv::poincare(from_intervals(rr));
    const std::vector<double> a(rr.begin(), rr.end() - 1), b(rr.begin() + 1, rr.end());
    const double expected = pop_var(a) + pop_var(b);
    CHECK(std::abs(p.sd1 * p.sd1 + p.sd2 * p.sd2 - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("alternating series: sd1 = rmssd / sqrt(2)") {
  std::vector<double> rr;
  for (int i = 0; i < 101; ++i) rr.push_back(i % 2 ? 860.0 : 740.0);
  const auto ibi = from_intervals(rr);
  const double rmssd = hrv::hrv_time_domain(ibi).rmssd;
  CHECK(std::abs(hrv::poincare(ibi).sd1 - rmssd / std::sqrt(2.0)) <= 1e-9 * rmssd);
}

TEST_CASE("white RR noise: sd1 close to rmssd / sqrt(2)") {
  synth::RrSpec spec;
  spec.noise_ms = 15;
  spec.duration_s = 400;
  const auto ibi = synth::gen_rr(spec, 4);
  REQUIRE(ibi.size() >= 300);
  const double rmssd = hrv::hrv_time_domain(ibi).rmssd;
  CHECK(std::abs(hrv::poincare(ibi).sd1 - rmssd / std::sqrt(2.0)) / rmssd <= 0.05);
}

TEST_CASE("equal LF and HF modulation gives a balanced spectrum") {
  synth::RrSpec spec;
  spec.lf_amp_ms = 20;
  spec.hf_amp_ms = 20;
  spec.duration_s = 300;
  const auto fd = hrv::hrv_frequency_domain(synth::gen_rr(spec, 1));
  REQUIRE(fd.lf_hf.has_value());
  CHECK(*fd.lf_hf >= 0.8);
  CHECK(*fd.lf_hf <= 1.25);
  CHECK(*fd.lf_nu == doctest::Approx(50.0).epsilon(0.1));
  CHECK(*fd.lf_nu + *fd.hf_nu == doctest::Approx(100.0));
  CHECK(*fd.vlf_pct + *fd.lf_pct + *fd.hf_pct <= 100.0 + 1e-9);
}

TEST_CASE("single HF tone dominates total power") {
  synth::RrSpec spec;
  spec.hf_amp_ms = 30;
  spec.duration_s = 300;
  const auto fd = hrv::hrv_frequency_domain(synth::gen_rr(spec, 1));
  CHECK(*fd.hf_pct > 80.0);
}

TEST_CASE("frequency domain refuses short series") {
  synth::RrSpec spec;
  spec.duration_s = 30;
  try {
    hrv::hrv_frequency_domain(synth::gen_rr(spec, 1));
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooShort);
  }
}

TEST_CASE("field names and values line up") {
  const auto ibi = from_intervals(std::vector<double>(80, 800.0));
  hrv::HrvFeatures f;
  f.time = hrv::hrv_time_domain(ibi);
  f.nonlinear = hrv::poincare(ibi);
  const auto v = hrv::field_values(f);
  CHECK(hrv::kFieldNames[0] == "mean_rr");
  CHECK(*v[0] == doctest::Approx(800.0));
  CHECK(hrv::kFieldNames[4] == "nn50");
}

TEST_CASE("R-peak detection on a clean 800 ms train") {
  synth::RrSpec spec;
  spec.duration_s = 30;
  spec.t_start = 0.5;
  const auto truth = synth::gen_rr(spec, 1);
  synth::EcgOptions opt;
  opt.duration_s = 31;
  const auto ecg = synth::gen_ecg(truth, opt, 2);
  const auto peaks = hrv::detect_rpeaks(ecg);
  CHECK(peaks.size() >= 37);
  CHECK(peaks.size() <= 38);
  REQUIRE(peaks.size() == truth.beat_times_s.size());
  for (size_t i = 0; i < peaks.size(); ++i) CHECK(std::abs(peaks[i] - truth.beat_times_s[i]) <= 0.020);
  const auto ibi = hrv::ibi_from_peaks(peaks);
  for (double r : ibi.intervals_ms) CHECK(std::abs(r - 800.0) <= 4.0);
}

TEST_CASE("R-peak detection at 10 dB SNR keeps at least 95% of beats") {
  synth::RrSpec spec;
  spec.lf_amp_ms = 30;
  spec.hf_amp_ms = 20;
  spec.noise_ms = 20;
  spec.duration_s = 120;
  spec.t_start = 0.5;
  const auto truth = synth::gen_rr(spec, 9);
  synth::EcgOptions opt;
  opt.snr_db = 10;
  const auto ecg = synth::gen_ecg(truth, opt, 10);
  const auto peaks = hrv::detect_rpeaks(ecg);
  size_t hit = 0;
  for (double t : truth.beat_times_s) {
    for (double p : peaks) {
      if (std::abs(p - t) <= 0.020) {
        ++hit;
        break;
      }
    }
  }
  CHECK(double(hit) / double(truth.beat_times_s.size()) >= 0.95);
  for (size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] - peaks[i - 1] >= 0.250);
}

TEST_CASE("flat ECG has no peaks") {
  TimeSeries flat{std::vector<double>(2560, 0.1), 256.0, 0.0, Unit::kMillivolt, "ecg"};
  try {
    hrv::detect_rpeaks(flat);
    FAIL("expected NoPeaks");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoPeaks);
  }
}

TEST_CASE("artifact correction restores a missed beat") {
  std::vector<double> rr(60, 800.0);
  rr[30] = 2400.0;
  const auto ibi = from_intervals(rr);
  const auto fixed = hrv::correct_artifacts(ibi);
  REQUIRE(fixed.size() == ibi.size());
  CHECK(fixed.corrected_mask[30]);
  CHECK(std::abs(fixed.intervals_ms[30] - 800.0) <= 10.0);
  size_t flagged = 0;
  for (bool b : fixed.corrected_mask) flagged += b;
  CHECK(flagged == 1);
  hrv::validate(fixed);
  for (size_t i = 0; i < fixed.size(); ++i) {
    CHECK(fixed.intervals_ms[i] ==
          doctest::Approx(1000.0 * (fixed.beat_times_s[i + 1] - fixed.beat_times_s[i])).epsilon(1e-9));
  }
}

TEST_CASE("too many artifacts reject the trial") {
  std::vector<double> rr(40, 800.0);
  for (size_t i = 0; i < 40; i += 3) rr[i] = 2500.0;
  try {
    hrv::correct_artifacts(from_intervals(rr));
    FAIL("expected TrialRejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTrialRejected);
  }
}

TEST_CASE("ibi needs two beats") {
  CHECK_THROWS_AS(hrv::ibi_from_peaks(std::vector<double>{1.0}), Error);
}

TEST_CASE("normal sinus variability is not mistaken for artifacts") {
  synth::RrSpec spec;
  spec.base_ms = 740;
  spec.lf_amp_ms = 20;
  spec.hf_amp_ms = 20;
  spec.noise_ms = 20;
  spec.duration_s = 300;
  spec.t_start = 0.5;
  synth::EcgOptions opt;
  opt.snr_db = 20;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ibi = hrv::ibi_from_peaks(hrv::detect_rpeaks(synth::gen_ecg(synth::gen_rr(spec, seed), opt, seed)));
    const auto fixed = hrv::correct_artifacts(ibi);
    size_t flagged = 0;
    for (bool b : fixed.corrected_mask) flagged += b;
    CHECK(double(flagged) <= 0.01 * double(ibi.size()));
  }
}

TEST_CASE("a premature beat is flagged") {
  std::vector<double> rr(60, 800.0);
  rr[20] = 450.0;
  rr[21] = 1150.0;
  const auto fixed = hrv::correct_artifacts(from_intervals(rr));
  CHECK(fixed.corrected_mask[20]);
  CHECK(fixed.corrected_mask[21]);
}
