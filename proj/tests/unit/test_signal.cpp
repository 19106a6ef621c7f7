#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/fft.hpp"
#include "valence/filter.hpp"
#include "valence/signal.hpp"
#include "valence/spectrum.hpp"
#include "valence/spline.hpp"

using namespace valence;

namespace {

constexpr double kPi = std::numbers::pi;

TimeSeries sine(double freq, double amp, double rate, double seconds) {
  TimeSeries ts;
  ts.rate = rate;
  ts.samples.resize(static_cast<size_t>(std::llround(seconds * rate)));
  for (size_t i = 0; i < ts.size(); ++i) ts.samples[i] = amp * std::sin(2 * kPi * freq * i / rate);
  return ts;
}

double rms(std::span<const double> x, size_t skip = 0) {
  double s = 0;
  for (size_t i = skip; i + skip < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

}  // namespace

TEST_CASE("descriptive statistics on a small sample") {
  const std::vector<double> v = {4, 1, 3, 2, 10};
  CHECK(mean(v) == doctest::Approx(4.0));
  CHECK(median(v) == 3.0);
  CHECK(sample_variance(v) == doctest::Approx(12.5));
  CHECK(population_variance(v) == doctest::Approx(10.0));
  CHECK(mad(v) == 1.0);
  CHECK(quantile(v, 0.5) == 3.0);
  CHECK(quantile(v, 1.0) == 10.0);
  CHECK(quantile(v, 0.25) == 2.0);
}

TEST_CASE("real_fft matches a direct DFT") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (size_t n : {1u, 2u, 7u, 16u, 33u}) {
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    const auto X = real_fft(x);
    REQUIRE(X.size() == n / 2 + 1);
    for (size_t k = 0; k < X.size(); ++k) {
      std::complex<double> ref = 0;
      for (size_t t = 0; t < n; ++t) ref += x[t] * std::polar(1.0, -2 * kPi * double(k * t) / double(n));
      CHECK(std::abs(X[k] - ref) < 1e-10);
    }
  }
}

TEST_CASE("periodogram integrates to the mean square (Parseval)") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> x(512);
  for (double& v : x) v = g(rng);
  // Rectangular weighting is not what we use, so compare against the
  // Hann-weighted mean square.
  const auto w = hann_window(x.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += w[i] * w[i] * x[i] * x[i];
    den += w[i] * w[i];
  }
  const Psd p = periodogram(x, 64.0, Detrend::kNone);
  double total = 0;
  for (double v : p.power) total += v * p.df;
  CHECK(total == doctest::Approx(num / den).epsilon(1e-10));
}

TEST_CASE("welch band power of a sine is amp^2 / 2") {
  const auto ts = sine(10.0, 3.0, 256.0, 20.0);
  const Psd p = welch(ts.samples, ts.rate);
  CHECK(p.df == doctest::Approx(0.5));
  CHECK(band_sum(p, 8.0, 13.0) == doctest::Approx(4.5).epsilon(0.01));
  CHECK(band_sum(p, 20.0, 40.0) < 1e-6);
  // Adjacent bands add up exactly.
  CHECK(band_sum(p, 1, 5) + band_sum(p, 5, 9) == doctest::Approx(band_sum(p, 1, 9)).epsilon(1e-14));
}

TEST_CASE("linear detrend removes a line exactly") {
  std::vector<double> x(50);
  for (size_t i = 0; i < x.size(); ++i) x[i] = 3.0 - 0.25 * double(i);
  for (double v : linear_detrend(x)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("Butterworth magnitude is 1/sqrt(2) at the cutoff") {
  for (double fc : {0.5, 10.0, 45.0}) {
    const auto lp = butterworth_lowpass(4, fc, 256.0);
    const auto hp = butterworth_highpass(4, fc, 256.0);
    CHECK(magnitude_response(lp, fc, 256.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(magnitude_response(hp, fc, 256.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(magnitude_response(lp, 0.0, 256.0) == doctest::Approx(1.0));
    CHECK(magnitude_response(hp, 128.0, 256.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("zero-phase lowpass keeps a slow sine and kills a fast one") {
  const auto slow = sine(2.0, 1.0, 200.0, 10.0);
  const auto fast = sine(60.0, 1.0, 200.0, 10.0);
  const auto ys = lowpass(slow, 20.0);
  const auto yf = lowpass(fast, 20.0);
  // No phase shift: sample-by-sample agreement away from the edges.
  for (size_t i = 200; i + 200 < ys.size(); ++i) CHECK(ys.samples[i] == doctest::Approx(slow.samples[i]).epsilon(1e-3));
  CHECK(rms(yf.samples, 200) < 1e-3);
}

TEST_CASE("highpass removes a DC offset") {
  auto ts = sine(10.0, 1.0, 128.0, 8.0);
  for (double& v : ts.samples) v += 5.0;
  const auto y = highpass(ts, 0.5);
  CHECK(std::abs(mean(std::span<const double>(y.samples).subspan(128, y.size() - 256))) < 1e-2);
  CHECK_THROWS_AS(highpass(ts, 64.0), Error);
}

TEST_CASE("natural spline interpolates knots and reproduces lines") {
  const std::vector<double> x = {0, 1, 2.5, 4, 7};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v - 1);
  const CubicSpline s(x, y);
  for (double t : {-1.0, 0.3, 2.0, 5.5, 9.0}) CHECK(s(t) == doctest::Approx(2 * t - 1));
  const std::vector<double> y2 = {0, 1, -1, 2, 0};
  const CubicSpline s2(x, y2);
  for (size_t i = 0; i < x.size(); ++i) CHECK(s2(x[i]) == doctest::Approx(y2[i]));
  CHECK_THROWS_AS(CubicSpline(std::vector<double>{0, 0}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("resample length and content") {
  const auto ts = sine(1.0, 1.0, 256.0, 28.0);
  const auto down = resample(ts, 128.0);
  CHECK(down.size() == 3584);
  const auto up = resample(sine(0.05, 1.0, 1.0, 28.0), 1000.0);
  CHECK(up.size() == 28000);
  const auto back = resample(down, 256.0);
  for (size_t i = 256; i + 256 < back.size(); ++i) CHECK(back.samples[i] == doctest::Approx(ts.samples[i]).epsilon(1e-3));
}

TEST_CASE("common average reference leaves zero cross-channel sum") {
  MultiChannelRecording rec;
  for (int c = 0; c < 4; ++c) {
    auto ts = sine(3.0 + c, 1.0 + c, 64.0, 2.0);
    ts.label = "C" + std::to_string(c);
    rec.channels.push_back(ts);
  }
  const auto car = car_rereference(rec);
  for (size_t i = 0; i < car.length(); ++i) {
    double s = 0;
    for (const auto& ch : car.channels) s += ch.samples[i];
    CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("MAD outlier replacement hand cases") {
  // median 3, MAD 1, threshold 3 * 1.4826; 100 is the only outlier.
  const auto r = mad_outlier_replace(std::vector<double>{1, 2, 3, 4, 100});
  CHECK(r.count() == 1);
  CHECK(r.mask[4]);
  CHECK(r.values[4] == 2.5);
  CHECK(r.values[0] == 1.0);
  CHECK_FALSE(r.degenerate);

  std::vector<double> flat(20, 28.8);
  flat[7] = 45.0;
  const auto f = mad_outlier_replace(flat);
  CHECK(f.count() == 1);
  CHECK(f.degenerate);
  CHECK(f.values[7] == 28.8);

  const auto none = mad_outlier_replace(std::vector<double>(5, 1.0));
  CHECK(none.count() == 0);
}

TEST_CASE("zscore flags zero variance") {
  const auto z = zscore(std::vector<double>{2, 4, 6});
  CHECK(z.values[0] == doctest::Approx(-1.0));
  CHECK(z.values[2] == doctest::Approx(1.0));
  CHECK(zscore(std::vector<double>{3, 3, 3}).zero_variance);
}

TEST_CASE("segment cuts floor(duration / window) windows") {
  MultiChannelRecording rec;
  for (const char* l : {"A", "B"}) {
    TimeSeries ts = sine(5, 1, 100, 100);
    ts.label = l;
    rec.channels.push_back(ts);
  }
  const std::vector<TrialSpec> trials = {{1.0, 60.0, Label::kPositive, "t1"},
                                         {61.0, 10.0, Label::kBaseline, "b1"},
                                         {71.0, 28.0, Label::kNegative, "t2"}};
  const auto segs = segment(rec, trials, 28.0);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].window_index == 0);
  CHECK(segs[1].window_index == 1);
  CHECK(segs[1].data.channels[0].size() == 2800);
  CHECK(segs[1].data.channels[0].t0 == doctest::Approx(29.0));
  CHECK(segs[2].trial.trial_id == "t2");

  const std::vector<TrialSpec> outside = {{90.0, 20.0, Label::kPositive, "late"}};
  CHECK_THROWS_AS(segment(rec, outside, 10.0), Error);
  try {
    slice(rec.channels[0], 95.0, 10.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfBounds);
  }
}
