#include "valence/eeg.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"

namespace valence::eeg {

namespace {

constexpr std::array<std::string_view, kBandCount> kBandNames = {"Alpha", "Beta1", "Beta2", "Gamma"};
constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "PF_left", "PF_right", "F_mid", "C_left", "C_right", "C_mid",
    "P_left",  "P_right",  "PO_mid", "O_left", "O_right"};

// Electrode names of the extended 10/10 system (upper-case comparison).
const std::set<std::string>& labels_1010() {
  static const std::set<std::string> labels = [] {
    std::set<std::string> s = {"NZ", "FPZ", "FP1", "FP2", "AFZ", "FZ", "FCZ", "CZ", "CPZ", "PZ",
                               "POZ", "OZ", "IZ", "T7", "T8", "T9", "T10", "TP7", "TP8", "TP9",
                               "TP10", "FT7", "FT8", "FT9", "FT10", "A1", "A2", "M1", "M2",
                               "T3", "T4", "T5", "T6"};
    const std::array<std::string_view, 11> rows = {"AF", "F", "FC", "C", "CP", "P", "PO", "O", "FT", "TP", "I"};
    for (auto row : rows) {
      for (int k = 1; k <= 10; ++k) s.insert(std::string(row) + std::to_string(k));
    }
    return s;
  }();
  return labels;
}

std::string upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

struct ChannelSpectra {
  const MultiChannelRecording& rec;
  const WelchOptions& welch;
  std::vector<std::optional<Psd>> cache;

  const Psd& get(size_t channel) {
    if (!cache[channel]) cache[channel] = valence::welch(rec.channels[channel].samples, rec.rate(), welch);
    return *cache[channel];
  }
};

void check_band(const BandDef& band, double rate) {
  require(band.lo > 0.0 && band.lo < band.hi, "band '" + std::string(name(band.band)) + "' has invalid edges");
  require(band.hi <= rate / 2.0, "band '" + std::string(name(band.band)) + "' exceeds the Nyquist frequency");
}

size_t channel_index(const MultiChannelRecording& rec, const std::string& electrode, Region region) {
  const auto idx = rec.find(electrode);
  if (!idx) {
    fail(ErrorCode::kSchema, "electrode '" + electrode + "' required by region '" +
                                 std::string(name(region)) + "' is missing");
  }
  return *idx;
}

double region_power_cached(ChannelSpectra& spectra, const RegionDef& region, const BandDef& band) {
  require(!region.electrodes.empty(), "region '" + std::string(name(region.region)) + "' has no electrodes");
  double acc = 0.0;
  for (const auto& e : region.electrodes) {
    acc += band_sum(spectra.get(channel_index(spectra.rec, e, region.region)), band.lo, band.hi);
  }
  return acc / static_cast<double>(region.electrodes.size());
}

}  // namespace

std::string_view name(Band band) { return kBandNames[static_cast<size_t>(band)]; }
std::string_view name(Region region) { return kRegionNames[static_cast<size_t>(region)]; }

std::optional<Band> parse_band(std::string_view text) {
  for (size_t i = 0; i < kBandCount; ++i) {
    if (kBandNames[i] == text) return static_cast<Band>(i);
  }
  return std::nullopt;
}

std::optional<Region> parse_region(std::string_view text) {
  for (size_t i = 0; i < kRegionCount; ++i) {
    if (kRegionNames[i] == text) return static_cast<Region>(i);
  }
  return std::nullopt;
}

bool is_1010_label(std::string_view label) { return labels_1010().contains(upper(label)); }

Montage Montage::standard() {
  Montage m;
  m.bands = {{{Band::kAlpha, 8.0, 13.0},
              {Band::kBeta1, 13.0, 20.0},
              {Band::kBeta2, 20.0, 30.0},
              {Band::kGamma, 30.0, 45.0}}};
  m.regions = {{{Region::kPfLeft, {"Fp1", "AF3", "AF7"}},
                {Region::kPfRight, {"Fp2", "AF4", "AF8"}},
                {Region::kFMid, {"Fz"}},
                {Region::kCLeft, {"C3", "C5"}},
                {Region::kCRight, {"C4", "C6"}},
                {Region::kCMid, {"Cz"}},
                {Region::kPLeft, {"P3", "P5"}},
                {Region::kPRight, {"P4", "P6"}},
                {Region::kPoMid, {"POz"}},
                {Region::kOLeft, {"O1", "PO7"}},
                {Region::kORight, {"O2", "PO8"}}}};
  return m;
}

void Montage::validate() const {
  for (size_t i = 0; i < kBandCount; ++i) {
    const auto& b = bands[i];
    require(b.band == static_cast<Band>(i), "band table out of order");
    require(b.lo > 0.0 && b.lo < b.hi && b.hi <= 45.0,
            "band '" + std::string(name(b.band)) + "' must satisfy 0 < lo < hi <= 45 Hz");
  }
  for (size_t i = 0; i < kRegionCount; ++i) {
    const auto& r = regions[i];
    require(r.region == static_cast<Region>(i), "region table out of order");
    require(!r.electrodes.empty(), "region '" + std::string(name(r.region)) + "' has no electrodes");
    for (const auto& e : r.electrodes) {
      require(is_1010_label(e), "'" + e + "' is not a 10/10 electrode label");
    }
  }
  for (const auto& pair : kAsymmetryPairs) {
    const auto& l = region(pair.left).electrodes;
    const auto& r = region(pair.right).electrodes;
    for (const auto& e : l) {
      require(std::find(r.begin(), r.end(), e) == r.end(),
              "electrode '" + e + "' appears in both hemispheres of a pair");
    }
  }
}

double band_power(const TimeSeries& ts, const BandDef& band, const WelchOptions& welch) {
  check_band(band, ts.rate);
  if (ts.duration() < 2.0 / band.lo) {
    fail(ErrorCode::kTooShort, "series too short to resolve band '" + std::string(name(band.band)) + "'");
  }
  return band_sum(valence::welch(ts.samples, ts.rate, welch), band.lo, band.hi);
}

double region_power(const MultiChannelRecording& rec, const RegionDef& region, const BandDef& band,
                    const WelchOptions& welch) {
  validate(rec);
  check_band(band, rec.rate());
  ChannelSpectra spectra{rec, welch, std::vector<std::optional<Psd>>(rec.channels.size())};
  return region_power_cached(spectra, region, band);
}

std::vector<std::string> EegFeatureVector::names() {
  std::vector<std::string> out;
  for (const auto& slot : kModelFeatures) {
    out.push_back(std::string(name(slot.region)) + "_" + std::string(name(slot.band)));
  }
  return out;
}

std::string pair_name(const AsymmetryPair& pair) {
  std::string region(name(pair.left));
  region = region.substr(0, region.find('_'));
  return region + "_" + std::string(name(pair.band));
}

WindowFeatures extract_features(const MultiChannelRecording& rec, const Montage& montage,
                                const WelchOptions& welch) {
  validate(rec);
  for (const auto& b : montage.bands) {
    check_band(b, rec.rate());
    if (rec.channels.front().duration() < 2.0 / b.lo) {
      fail(ErrorCode::kTooShort, "window too short to resolve band '" + std::string(name(b.band)) + "'");
    }
  }
  ChannelSpectra spectra{rec, welch, std::vector<std::optional<Psd>>(rec.channels.size())};
  WindowFeatures out;
  for (size_t i = 0; i < kModelFeatures.size(); ++i) {
    const auto& slot = kModelFeatures[i];
    out.model.values[i] = region_power_cached(spectra, montage.region(slot.region), montage.band(slot.band));
  }
  for (size_t i = 0; i < kAsymmetryPairs.size(); ++i) {
    const auto& pair = kAsymmetryPairs[i];
    const auto& band = montage.band(pair.band);
    out.asymmetry.left[i] = region_power_cached(spectra, montage.region(pair.left), band);
    out.asymmetry.right[i] = region_power_cached(spectra, montage.region(pair.right), band);
  }
  return out;
}

EegFeatureVector extract_model_features(const MultiChannelRecording& rec, const Montage& montage,
                                        const WelchOptions& welch) {
  return extract_features(rec, montage, welch).model;
}

std::optional<double> asymmetry_index(double right_power, double left_power) {
  require(right_power >= 0.0 && left_power >= 0.0, "band powers must be non-negative");
  const double total = right_power + left_power;
  if (!(total > 0.0)) return std::nullopt;
  return (right_power - left_power) / total;
}

AsymmetryStats asymmetry_report(std::span<const AsymmetryRow> rows) {
  size_t n_pos = 0;
  size_t n_neg = 0;
  for (const auto& r : rows) {
    if (r.label == Label::kPositive) ++n_pos;
    if (r.label == Label::kNegative) ++n_neg;
  }
  if (n_pos < 2 || n_neg < 2) {
    fail(ErrorCode::kInfeasible, "asymmetry report needs at least two rows per condition");
  }

  AsymmetryStats out;
  for (size_t i = 0; i < kAsymmetryPairs.size(); ++i) {
    std::vector<double> ai_pos, ai_neg, left_pos, right_pos, left_neg, right_neg;
    for (const auto& r : rows) {
      if (r.label == Label::kBaseline) continue;
      const bool pos = r.label == Label::kPositive;
      (pos ? left_pos : left_neg).push_back(r.powers.left[i]);
      (pos ? right_pos : right_neg).push_back(r.powers.right[i]);
      // Rows with no power on either side carry no asymmetry information.
      if (const auto ai = asymmetry_index(r.powers.right[i], r.powers.left[i])) {
        (pos ? ai_pos : ai_neg).push_back(*ai);
      }
    }
    PairStats ps;
    ps.pair = pair_name(kAsymmetryPairs[i]);
    ps.n_positive = ai_pos.size();
    ps.n_negative = ai_neg.size();
    if (ai_pos.empty() || ai_neg.empty()) {
      fail(ErrorCode::kInfeasible, "pair " + ps.pair + " has no defined asymmetry index in one condition");
    }
    ps.mean_ai_positive = mean(ai_pos);
    ps.mean_ai_negative = mean(ai_neg);
    ps.positive_vs_negative = stats::mann_whitney(ai_pos, ai_neg);
    ps.left_vs_right_positive = stats::mann_whitney(left_pos, right_pos);
    ps.left_vs_right_negative = stats::mann_whitney(left_neg, right_neg);
    out.pairs.push_back(std::move(ps));
  }
  return out;
}

}  // namespace valence::eeg
