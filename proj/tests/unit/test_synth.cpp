#include <doctest.h>

#include <cmath>
#include <set>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/spectrum.hpp"
#include "valence/synth.hpp"

using namespace valence;

TEST_CASE("RR generator keeps beat times and intervals consistent") {
  synth::RrSpec spec;
  spec.lf_amp_ms = 25;
  spec.noise_ms = 10;
  spec.duration_s = 120;
  spec.t_start = 2.0;
  const auto ibi = synth::gen_rr(spec, 3);
  CHECK(ibi.beat_times_s.front() == 2.0);
  CHECK(ibi.beat_times_s.back() <= 122.0);
  for (size_t i = 0; i < ibi.size(); ++i) {
    CHECK(ibi.intervals_ms[i] == doctest::Approx(1000.0 * (ibi.beat_times_s[i + 1] - ibi.beat_times_s[i])));
  }
  CHECK(mean(ibi.intervals_ms) == doctest::Approx(800.0).epsilon(0.02));
  const auto again = synth::gen_rr(spec, 3);
  CHECK(again.intervals_ms == ibi.intervals_ms);
  CHECK(synth::gen_rr(spec, 4).intervals_ms != ibi.intervals_ms);
}

TEST_CASE("band noise has unit mean square inside its band") {
  const auto x = synth::band_noise(128 * 60, 8.0, 13.0, 128.0, 5);
  double ms = 0;
  for (double v : x) ms += v * v;
  CHECK(ms / double(x.size()) == doctest::Approx(1.0).epsilon(1e-9));
  const Psd p = welch(x, 128.0);
  // Fourth-order skirts: most power within a few hertz of the edges.
  CHECK(band_sum(p, 5.0, 17.0) > 0.9 * band_sum(p, 0.0, 64.0));
  CHECK(band_sum(p, 8.0, 13.0) > 0.5 * band_sum(p, 0.0, 64.0));
}

TEST_CASE("ECG noise follows the requested SNR") {
  synth::RrSpec rr;
  rr.duration_s = 60;
  const auto ibi = synth::gen_rr(rr, 1);
  synth::EcgOptions clean_opt;
  const auto clean = synth::gen_ecg(ibi, clean_opt, 2);
  synth::EcgOptions noisy_opt;
  noisy_opt.snr_db = 10.0;
  const auto noisy = synth::gen_ecg(ibi, noisy_opt, 2);
  REQUIRE(clean.size() == noisy.size());
  double ps = 0, pn = 0;
  for (size_t i = 0; i < clean.size(); ++i) {
    ps += clean.samples[i] * clean.samples[i];
    pn += (noisy.samples[i] - clean.samples[i]) * (noisy.samples[i] - clean.samples[i]);
  }
  CHECK(10.0 * std::log10(ps / pn) == doctest::Approx(10.0).epsilon(0.05));
  CHECK(clean.rate == 256.0);
  CHECK(clean.unit == Unit::kMillivolt);
}

TEST_CASE("presets exist and validate") {
  for (const auto& name : synth::DatasetSpec::preset_names()) {
    const auto spec = synth::DatasetSpec::preset_named(name);
    spec.validate();
    CHECK(spec.preset == name);
  }
  CHECK_THROWS_AS(synth::DatasetSpec::preset_named("nope"), Error);
  auto bad = synth::DatasetSpec::preset_named("null");
  bad.females = bad.subjects + 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("timeline alternates baselines and clips") {
  const synth::SyntheticSource source(synth::DatasetSpec::preset_named("paper-shape"), 9);
  const auto& tl = source.timeline(0);
  REQUIRE(tl.size() == 29);
  std::set<std::string> ids;
  size_t pos = 0, neg = 0;
  for (size_t i = 0; i < tl.size(); ++i) {
    CHECK((i % 2 == 0) == (tl[i].label == Label::kBaseline));
    CHECK(tl[i].duration == std::round(tl[i].duration));
    if (i > 0) CHECK(tl[i].start == doctest::Approx(tl[i - 1].start + tl[i - 1].duration));
    ids.insert(tl[i].trial_id);
    pos += tl[i].label == Label::kPositive;
    neg += tl[i].label == Label::kNegative;
  }
  CHECK(ids.size() == 29);
  CHECK(pos == 7);
  CHECK(neg == 7);
  CHECK(source.recording_s(0) >= tl.back().start + tl.back().duration);
  // Clip durations are a property of the video, not the viewer.
  const auto& other = source.timeline(1);
  for (const auto& a : tl) {
    for (const auto& b : other) {
      if (a.trial_id == b.trial_id) CHECK(a.duration == b.duration);
    }
  }
}

TEST_CASE("subjects are reproducible and independent of dataset size") {
  auto spec = synth::DatasetSpec::preset_named("paper-shape");
  spec.eeg_rate = 128.0;
  spec.subjects = 3;
  spec.females = 1;
  const synth::SyntheticSource a(spec, 4);
  spec.subjects = 5;
  const synth::SyntheticSource b(spec, 4);
  const auto sa = a.load(1);
  const auto sb = b.load(1);
  CHECK(sa.meta.id == "S02");
  CHECK(sa.meta.id == sb.meta.id);
  // Temperature offsets are standardised over the cohort, so only the
  // electrical signals are size-independent.
  CHECK(sa.temp->samples.size() == sb.temp->samples.size());
  CHECK(sa.ecg->samples == sb.ecg->samples);
  CHECK(sa.eeg->channels[3].samples == sb.eeg->channels[3].samples);
  CHECK(sa.eeg->channels.size() == synth::electrode_labels().size());
  CHECK(a.load(1).eeg->channels[0].samples == sa.eeg->channels[0].samples);
  CHECK(a.truth(1)["id"] == "S02");
}

TEST_CASE("disabled modalities are not generated") {
  auto spec = synth::DatasetSpec::preset_named("paper-means");
  spec.subjects = 2;
  spec.females = 1;
  spec.with_eeg = false;
  spec.with_ecg = false;
  const synth::SyntheticSource source(spec, 1);
  const auto s = source.load(0);
  CHECK_FALSE(s.eeg.has_value());
  CHECK_FALSE(s.ecg.has_value());
  REQUIRE(s.temp.has_value());
  CHECK(s.temp->rate == 1.0);
}

TEST_CASE("feature matrix generator shifts the positive class") {
  synth::MatrixSpec spec;
  spec.subjects = 4;
  spec.trials_per_class = 50;
  spec.feature_names = {"a", "b"};
  spec.effects = {{"a", 2.0}};
  const auto m = synth::gen_feature_matrix(spec, 3);
  CHECK(m.rows() == 400);
  double pa = 0, na = 0, pb = 0, nb = 0;
  for (size_t i = 0; i < m.rows(); ++i) {
    const bool p = m.labels[i] == Label::kPositive;
    (p ? pa : na) += m.at(i, 0);
    (p ? pb : nb) += m.at(i, 1);
  }
  CHECK((pa - na) / 200.0 > 1.5);
  CHECK(std::abs(pb - nb) / 200.0 < 0.5);
  m.validate();
}
