#include "valence/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/filter.hpp"
#include "valence/fusion.hpp"
#include "valence/random.hpp"

namespace valence::synth {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLeadIn = 1.0;  // seconds of recording before the first trial and after the last

struct Wave {
  double offset_s;
  double amplitude_mv;
  double sigma_s;
};

constexpr std::array<Wave, 5> kBeatTemplate = {{
    {-0.160, 0.15, 0.025},  // P
    {-0.025, -0.10, 0.010},  // Q
    {0.000, 1.00, 0.010},   // R
    {0.025, -0.20, 0.010},  // S
    {0.250, 0.30, 0.050},   // T
}};

struct BaseBand {
  double lo;
  double hi;
  double power;
  std::optional<eeg::Band> band;
};

// Background spectrum per channel (uV^2). The four modelled bands carry the
// class effects; delta/theta are constant.
constexpr std::array<BaseBand, 6> kBackground = {{
    {1.0, 4.0, 12.0, std::nullopt},
    {4.0, 8.0, 8.0, std::nullopt},
    {8.0, 13.0, 10.0, eeg::Band::kAlpha},
    {13.0, 20.0, 5.0, eeg::Band::kBeta1},
    {20.0, 30.0, 3.0, eeg::Band::kBeta2},
    {30.0, 45.0, 1.5, eeg::Band::kGamma},
}};

size_t label_index(Label label) { return static_cast<size_t>(label); }

std::string two_digit(const char* prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

json effects_json(const std::vector<EegEffect>& effects, double scale) {
  json out = json::array();
  for (const auto& e : effects) {
    out.push_back({{"region", std::string(eeg::name(e.region))},
                   {"band", std::string(eeg::name(e.band))},
                   {"log_positive", scale * e.log_positive},
                   {"log_negative", scale * e.log_negative}});
  }
  return out;
}

}  // namespace

hrv::IbiSeries gen_rr(const RrSpec& spec, std::uint64_t seed) {
  const double noise = spec.noise_ms;
  return gen_rr(spec, [noise](double) { return noise; }, seed);
}

hrv::IbiSeries gen_rr(const RrSpec& spec, const std::function<double(double)>& noise_ms_at, std::uint64_t seed) {
  require(spec.base_ms >= 300.0, "base RR must be at least 300 ms");
  require(spec.lf_amp_ms >= 0.0 && spec.hf_amp_ms >= 0.0, "RR modulation amplitudes must be non-negative");
  require(spec.duration_s > 0.0, "RR duration must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> beats;
  const double end = spec.t_start + spec.duration_s;
  for (double t = spec.t_start; t <= end;) {
    beats.push_back(t);
    const double rr = spec.base_ms + spec.lf_amp_ms * std::sin(kTwoPi * spec.lf_hz * t) +
                      spec.hf_amp_ms * std::sin(kTwoPi * spec.hf_hz * t) + noise_ms_at(t) * gauss(rng);
    if (!(rr > 0.0)) fail(ErrorCode::kInvalidArgument, "RR model produced a non-positive interval");
    t += rr / 1000.0;
  }
  return hrv::ibi_from_peaks(beats);
}

TimeSeries gen_ecg(const hrv::IbiSeries& ibi, const EcgOptions& options, std::uint64_t seed) {
  require(!ibi.beat_times_s.empty(), "no beats to render");
  require(options.rate > 0.0, "ECG rate must be positive");
  const double duration =
      options.duration_s > 0.0 ? options.duration_s : ibi.beat_times_s.back() - options.t0 + 1.0;
  const auto n = static_cast<size_t>(std::llround(duration * options.rate));
  TimeSeries ts{std::vector<double>(n, 0.0), options.rate, options.t0, Unit::kMillivolt, "ecg_mv"};
  for (double beat : ibi.beat_times_s) {
    for (const auto& w : kBeatTemplate) {
      const double centre = beat + w.offset_s;
      const double reach = 5.0 * w.sigma_s;
      const long long first = std::max<long long>(0, std::llround(std::ceil((centre - reach - options.t0) * options.rate)));
      const long long last = std::min<long long>(static_cast<long long>(n) - 1,
                                                 std::llround(std::floor((centre + reach - options.t0) * options.rate)));
      for (long long i = first; i <= last; ++i) {
        const double dt = options.t0 + static_cast<double>(i) / options.rate - centre;
        ts.samples[i] += w.amplitude_mv * std::exp(-0.5 * dt * dt / (w.sigma_s * w.sigma_s));
      }
    }
  }
  if (std::isfinite(options.snr_db)) {
    double ms = 0.0;
    for (double v : ts.samples) ms += v * v;
    ms /= static_cast<double>(n);
    const double sigma = std::sqrt(ms / std::pow(10.0, options.snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : ts.samples) v += gauss(rng);
  }
  return ts;
}

std::vector<double> band_noise(size_t n, double lo, double hi, double rate, std::uint64_t seed) {
  require(lo >= 0.0 && hi > lo, "band edges must satisfy 0 <= lo < hi");
  SosFilter sos;
  if (lo > 0.0) sos = butterworth_highpass(4, lo, rate);
  if (hi < 0.999 * rate / 2.0) {
    const auto lp = butterworth_lowpass(4, hi, rate);
    sos.insert(sos.end(), lp.begin(), lp.end());
  }
  const auto lead = static_cast<size_t>(std::max(64.0, std::ceil(4.0 * rate / std::max(lo, 0.5))));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n + lead);
  for (double& v : white) v = gauss(rng);
  std::vector<double> y = sos.empty() ? white : sos_filter(sos, white);
  y.erase(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(lead));
  double ms = 0.0;
  for (double v : y) ms += v * v;
  ms /= static_cast<double>(std::max<size_t>(n, 1));
  if (ms > 0.0) {
    const double scale = 1.0 / std::sqrt(ms);
    for (double& v : y) v *= scale;
  }
  return y;
}

MultiChannelRecording gen_eeg(const std::vector<ChannelSpec>& channels, double rate, double duration_s,
                              std::uint64_t seed) {
  require(!channels.empty(), "no channels requested");
  require(rate > 0.0 && duration_s > 0.0, "rate and duration must be positive");
  const auto n = static_cast<size_t>(std::llround(duration_s * rate));
  MultiChannelRecording rec;
  rec.modality = Modality::kEeg;
  for (size_t c = 0; c < channels.size(); ++c) {
    TimeSeries ts{std::vector<double>(n, 0.0), rate, 0.0, Unit::kMicrovolt, channels[c].first};
    for (size_t k = 0; k < channels[c].second.size(); ++k) {
      const auto& comp = channels[c].second[k];
      require(comp.power >= 0.0, "band power must be non-negative");
      if (comp.power == 0.0) continue;
      const auto noise = band_noise(n, comp.lo, comp.hi, rate, derive_seed(seed, c * 64 + k));
      const double amp = std::sqrt(comp.power);
      for (size_t i = 0; i < n; ++i) ts.samples[i] += amp * noise[i];
    }
    rec.channels.push_back(std::move(ts));
  }
  return rec;
}

std::vector<EegEffect> paper_eeg_effects() {
  using eeg::Band;
  using eeg::Region;
  return {
      {Region::kPfLeft, Band::kAlpha, 0.5, 0.0},   {Region::kPfRight, Band::kAlpha, 0.0, 0.5},
      {Region::kPfLeft, Band::kBeta2, 0.5, 0.0},   {Region::kPfRight, Band::kBeta2, 0.0, 0.5},
      {Region::kPfLeft, Band::kBeta1, 0.3, 0.0},   {Region::kORight, Band::kBeta1, 0.5, 0.0},
      {Region::kOLeft, Band::kBeta1, 0.0, 0.5},    {Region::kORight, Band::kBeta2, 0.3, 0.0},
      {Region::kOLeft, Band::kBeta2, 0.0, 0.3},    {Region::kOLeft, Band::kGamma, 0.5, 0.0},
      {Region::kORight, Band::kGamma, 0.0, 0.5},   {Region::kPLeft, Band::kGamma, 0.6, 0.3},
      {Region::kPRight, Band::kGamma, 0.3, 0.0},   {Region::kFMid, Band::kBeta1, 0.4, 0.0},
      {Region::kCMid, Band::kAlpha, 0.0, 0.4},
  };
}

std::vector<std::string> electrode_labels() {
  std::vector<std::string> out;
  for (const auto& r : eeg::Montage::standard().regions) {
    for (const auto& e : r.electrodes) {
      if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
  }
  return out;
}

DatasetSpec DatasetSpec::preset_named(std::string_view name) {
  DatasetSpec s;
  s.preset = std::string(name);
  // Desk-scale timing: one 28 s window per clip, short baselines.
  auto desk = [](DatasetSpec& d) {
    d.clip_min_s = 40.0;
    d.clip_max_s = 48.0;
    d.baseline_s = 10.0;
  };
  if (name == "paper-shape") {
    desk(s);
    s.eeg_effects = paper_eeg_effects();
    s.hrv.noise_ms = {26.0, 20.0, 20.0};
  } else if (name == "paper-means") {
    s.eeg_effects = paper_eeg_effects();
  } else if (name == "null") {
    desk(s);
    s.temp.mean_c = {28.8, 28.8, 28.8};
    s.temp.subject_sd_c = {1.5, 1.5, 1.5};
  } else if (name == "sex-temp") {
    desk(s);
    s.temp.subject_sd_c = {0.5, 0.5, 0.5};
    s.temp.female_delta_c = {0.0, 1.0, 0.0};
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  return s;
}

std::vector<std::string> DatasetSpec::preset_names() { return {"paper-shape", "paper-means", "null", "sex-temp"}; }

void DatasetSpec::validate() const {
  require(subjects >= 1, "at least one subject is required");
  require(females <= subjects, "more females than subjects");
  require(positive_videos + negative_videos >= 1, "at least one video is required");
  require(clip_min_s > 0.0 && clip_max_s >= clip_min_s, "clip duration range is invalid");
  require(baseline_s > 0.0, "baseline duration must be positive");
  require(eeg_rate > 90.0, "EEG rate must exceed 90 Hz to hold the gamma band");
  require(ecg_rate > 0.0 && temp_rate > 0.0, "rates must be positive");
  require(hrv.base_ms >= 300.0, "base RR must be at least 300 ms");
}

SyntheticSource::SyntheticSource(DatasetSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
  const size_t n = spec_.subjects;

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 sex_rng(derive_seed(seed_, "sex"));
  std::shuffle(order.begin(), order.end(), sex_rng);
  sexes_.assign(n, Sex::kMale);
  for (size_t i = 0; i < spec_.females; ++i) sexes_[order[i]] = Sex::kFemale;

  // Subject temperature offsets, standardised so condition means and SDs
  // across subjects equal the spec exactly.
  std::mt19937_64 temp_rng(derive_seed(seed_, "temp-offsets"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  temp_z_.resize(n);
  for (double& z : temp_z_) z = gauss(temp_rng);
  if (n >= 2) {
    const double m = mean(temp_z_);
    const double sd = sample_sd(temp_z_);
    for (double& z : temp_z_) z = sd > 0.0 ? (z - m) / sd : 0.0;
  } else {
    temp_z_.assign(n, 0.0);
  }

  const size_t videos = spec_.positive_videos + spec_.negative_videos;
  std::mt19937_64 clip_rng(derive_seed(seed_, "clips"));
  const auto lo = static_cast<long long>(std::ceil(spec_.clip_min_s));
  const auto hi = std::max(lo, static_cast<long long>(std::floor(spec_.clip_max_s)));
  std::uniform_int_distribution<long long> clip_len(lo, hi);
  std::vector<double> durations(videos);
  for (double& d : durations) d = static_cast<double>(clip_len(clip_rng));

  for (size_t s = 0; s < n; ++s) {
    std::vector<size_t> clips(videos);
    for (size_t v = 0; v < videos; ++v) clips[v] = v;
    std::mt19937_64 order_rng(derive_seed(seed_, "order:" + std::to_string(s)));
    std::shuffle(clips.begin(), clips.end(), order_rng);
    std::vector<TrialSpec> tl;
    double t = kLeadIn;
    for (size_t k = 0; k <= videos; ++k) {
      tl.push_back({t, spec_.baseline_s, Label::kBaseline, two_digit("b", k + 1)});
      t += spec_.baseline_s;
      if (k == videos) break;
      const size_t v = clips[k];
      const Label label = v < spec_.positive_videos ? Label::kPositive : Label::kNegative;
      tl.push_back({t, durations[v], label, two_digit("v", v + 1)});
      t += durations[v];
    }
    timelines_.push_back(std::move(tl));
  }
}

std::string SyntheticSource::id(size_t index) const { return two_digit("S", index + 1); }

double SyntheticSource::recording_s(size_t index) const {
  const auto& last = timelines_.at(index).back();
  return last.start + last.duration + kLeadIn;
}

io::SubjectData SyntheticSource::load(size_t index) const { return generate(index, true).data; }

json SyntheticSource::truth(size_t index) const { return generate(index, false).truth; }

SyntheticSource::Generated SyntheticSource::generate(size_t index, bool signals) const {
  const auto& tl = timelines_.at(index);
  const double total = recording_s(index);
  const std::string sid = id(index);
  const std::uint64_t subject_seed = derive_seed(seed_, "subject:" + sid);
  const Sex sex = sexes_[index];

  Generated g;
  g.data.meta = {sid, sex, std::nullopt};
  {
    std::mt19937_64 rng(derive_seed(subject_seed, "age"));
    g.data.meta.age = static_cast<double>(std::uniform_int_distribution<int>(19, 35)(rng));
  }
  g.data.trials = tl;
  json truth;
  truth["id"] = sid;
  truth["sex"] = to_string(sex);

  auto trial_at = [&tl](double t) -> const TrialSpec& {
    for (const auto& tr : tl) {
      if (t < tr.start + tr.duration) return tr;
    }
    return tl.back();
  };

  // Temperature: one level per trial, sample noise and the odd spike.
  std::vector<double> levels(tl.size());
  {
    std::mt19937_64 rng(derive_seed(subject_seed, "temp"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& delta = sex == Sex::kFemale ? spec_.temp.female_delta_c : spec_.temp.male_delta_c;
    for (size_t k = 0; k < tl.size(); ++k) {
      const size_t c = label_index(tl[k].label);
      levels[k] = spec_.temp.mean_c[c] + spec_.temp.subject_sd_c[c] * temp_z_[index] + delta[c] +
                  spec_.temp.trial_sd_c * gauss(rng);
    }
    if (spec_.with_temp) {
      const auto n = static_cast<size_t>(std::llround(total * spec_.temp_rate));
      TimeSeries ts{std::vector<double>(n), spec_.temp_rate, 0.0, Unit::kCelsius, "temp_c"};
      size_t k = 0;
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec_.temp_rate;
        while (k + 1 < tl.size() && t >= tl[k].start + tl[k].duration) ++k;
        ts.samples[i] = levels[k] + spec_.temp.noise_sd_c * gauss(rng);
      }
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (const auto& tr : tl) {
        if (unit(rng) >= spec_.temp.spike_probability) continue;
        const auto first = static_cast<size_t>(std::ceil(tr.start * spec_.temp_rate));
        const auto last = static_cast<size_t>(std::ceil((tr.start + tr.duration) * spec_.temp_rate));
        if (last <= first + 2 || last > n) continue;
        std::uniform_int_distribution<size_t> pick(first + 1, last - 2);
        ts.samples[pick(rng)] = 45.0;
      }
      g.data.temp = std::move(ts);
    }
  }
  json trials = json::array();
  for (size_t k = 0; k < tl.size(); ++k) {
    trials.push_back({{"trial_id", tl[k].trial_id},
                      {"label", to_string(tl[k].label)},
                      {"start_s", tl[k].start},
                      {"duration_s", tl[k].duration},
                      {"temp_level_c", levels[k]}});
  }
  truth["trials"] = trials;

  // Heart: condition-dependent beat-to-beat noise.
  {
    std::mt19937_64 rng(derive_seed(subject_seed, "rr-base"));
    std::normal_distribution<double> gauss(spec_.hrv.base_ms, spec_.hrv.base_sd_ms);
    const double base = std::clamp(gauss(rng), 650.0, 1000.0);
    RrSpec rr;
    rr.base_ms = base;
    rr.lf_amp_ms = spec_.hrv.lf_amp_ms;
    rr.hf_amp_ms = spec_.hrv.hf_amp_ms;
    rr.t_start = 0.3;
    rr.duration_s = total - 1.0;
    const auto& noise = spec_.hrv.noise_ms;
    const auto ibi = gen_rr(
        rr, [&](double t) { return noise[label_index(trial_at(t).label)]; }, derive_seed(subject_seed, "rr"));
    truth["base_rr_ms"] = base;
    truth["beat_times_s"] = ibi.beat_times_s;
    if (spec_.with_ecg && signals) {
      EcgOptions opt;
      opt.rate = spec_.ecg_rate;
      opt.snr_db = spec_.hrv.ecg_snr_db;
      opt.duration_s = total;
      g.data.ecg = gen_ecg(ibi, opt, derive_seed(subject_seed, "ecg"));
    }
  }

  // EEG: band-limited noise with a per-trial gain on each modelled band.
  if (spec_.with_eeg && signals) {
    const auto labels = electrode_labels();
    const auto montage = eeg::Montage::standard();
    const double rate = spec_.eeg_rate;
    const auto n = static_cast<size_t>(std::llround(total * rate));
    std::vector<size_t> trial_of(n);
    {
      size_t k = 0;
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        while (k + 1 < tl.size() && t >= tl[k].start + tl[k].duration) ++k;
        trial_of[i] = k;
      }
    }
    const std::uint64_t eeg_seed = derive_seed(subject_seed, "eeg");
    std::mt19937_64 rng(derive_seed(eeg_seed, "gains"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    MultiChannelRecording rec;
    rec.subject = g.data.meta;
    rec.modality = Modality::kEeg;
    for (size_t c = 0; c < labels.size(); ++c) {
      std::vector<eeg::Region> regions;
      for (const auto& r : montage.regions) {
        if (std::find(r.electrodes.begin(), r.electrodes.end(), labels[c]) != r.electrodes.end()) {
          regions.push_back(r.region);
        }
      }
      const double subject_gain = spec_.eeg_subject_sd * gauss(rng);
      TimeSeries ts{std::vector<double>(n, 0.0), rate, 0.0, Unit::kMicrovolt, labels[c]};
      for (size_t b = 0; b < kBackground.size(); ++b) {
        const auto& bg = kBackground[b];
        std::vector<double> amp(tl.size());
        for (size_t k = 0; k < tl.size(); ++k) {
          double log_gain = subject_gain;
          if (bg.band) {
            log_gain += spec_.eeg_trial_sd * gauss(rng);
            for (const auto& e : spec_.eeg_effects) {
              if (e.band != *bg.band || std::find(regions.begin(), regions.end(), e.region) == regions.end()) {
                continue;
              }
              if (tl[k].label == Label::kPositive) log_gain += spec_.eeg_effect_scale * e.log_positive;
              if (tl[k].label == Label::kNegative) log_gain += spec_.eeg_effect_scale * e.log_negative;
            }
          }
          amp[k] = std::sqrt(bg.power * std::exp(log_gain));
        }
        const auto noise = band_noise(n, bg.lo, bg.hi, rate, derive_seed(eeg_seed, c * 64 + b));
        for (size_t i = 0; i < n; ++i) ts.samples[i] += amp[trial_of[i]] * noise[i];
      }
      rec.channels.push_back(std::move(ts));
    }
    g.data.eeg = std::move(rec);
  }
  g.truth = std::move(truth);
  return g;
}

json SyntheticSource::truth_summary() const {
  json out;
  out["seed"] = seed_;
  out["preset"] = spec_.preset;
  out["subjects"] = spec_.subjects;
  out["females"] = spec_.females;
  out["rates"] = {{"eeg", spec_.eeg_rate}, {"ecg", spec_.ecg_rate}, {"temp", spec_.temp_rate}};
  out["eeg_effects"] = effects_json(spec_.eeg_effects, spec_.eeg_effect_scale);

  // Expected log power difference (positive minus negative) per model feature.
  json deltas = json::object();
  const auto montage = eeg::Montage::standard();
  const auto names = eeg::EegFeatureVector::names();
  for (size_t i = 0; i < eeg::kModelFeatures.size(); ++i) {
    const auto& slot = eeg::kModelFeatures[i];
    double d = 0.0;
    for (const auto& e : spec_.eeg_effects) {
      if (e.region == slot.region && e.band == slot.band) d += spec_.eeg_effect_scale * (e.log_positive - e.log_negative);
    }
    deltas[names[i]] = d;
  }
  out["eeg_log_power_delta"] = deltas;
  out["temperature"] = {{"mean_c", spec_.temp.mean_c},
                        {"subject_sd_c", spec_.temp.subject_sd_c},
                        {"female_delta_c", spec_.temp.female_delta_c},
                        {"male_delta_c", spec_.temp.male_delta_c},
                        {"trial_sd_c", spec_.temp.trial_sd_c},
                        {"order", {"Positive", "Negative", "Baseline"}}};
  out["hrv"] = {{"noise_ms", spec_.hrv.noise_ms},
                {"lf_amp_ms", spec_.hrv.lf_amp_ms},
                {"hf_amp_ms", spec_.hrv.hf_amp_ms},
                {"ecg_snr_db", spec_.hrv.ecg_snr_db}};
  return out;
}

void write_dataset(const fs::path& out, const DatasetSpec& spec, std::uint64_t seed, size_t threads, bool force) {
  if (fs::exists(out) && !force) {
    fail(ErrorCode::kIo, "'" + out.string() + "' already exists (use --force to replace it)");
  }
  const SyntheticSource source(spec, seed);
  const fs::path tmp = out.string() + ".partial";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    std::vector<json> truths(source.size());
    fusion::parallel_for(source.size(), threads, [&](size_t i) {
      const io::SubjectData data = source.load(i);
      io::write_subject(tmp / source.id(i), data);
      truths[i] = source.truth(i);
    });
    json gt = source.truth_summary();
    gt["per_subject"] = truths;
    io::write_file_atomic(tmp / "ground_truth.json", gt.dump(1) + "\n");
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  if (fs::exists(out)) fs::remove_all(out);
  fs::rename(tmp, out);
}

ml::FeatureMatrix gen_feature_matrix(const MatrixSpec& spec, std::uint64_t seed) {
  require(!spec.feature_names.empty(), "feature matrix needs at least one column");
  const size_t d = spec.feature_names.size();
  std::vector<double> shift(d, 0.0);
  for (const auto& [name, size] : spec.effects) {
    const auto it = std::find(spec.feature_names.begin(), spec.feature_names.end(), name);
    require(it != spec.feature_names.end(), "effect on unknown column '" + name + "'");
    shift[static_cast<size_t>(it - spec.feature_names.begin())] = size;
  }
  ml::FeatureMatrix m;
  m.feature_names = spec.feature_names;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> row(d);
  for (size_t s = 0; s < spec.subjects; ++s) {
    const std::string sid = two_digit("S", s + 1);
    const Sex sex = s % 3 == 1 ? Sex::kFemale : Sex::kMale;
    std::vector<double> offset(d);
    for (double& o : offset) o = 0.5 * gauss(rng);
    size_t trial = 0;
    for (size_t k = 0; k < spec.trials_per_class; ++k) {
      for (Label label : {Label::kPositive, Label::kNegative}) {
        for (size_t j = 0; j < d; ++j) {
          row[j] = offset[j] + gauss(rng) + (label == Label::kPositive ? shift[j] : 0.0);
        }
        m.append_row(row, label, sid, sex, two_digit("t", ++trial));
      }
    }
  }
  return m;
}

}  // namespace valence::synth
