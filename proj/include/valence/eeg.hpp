#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valence/signal.hpp"
#include "valence/spectrum.hpp"
#include "valence/stats.hpp"

namespace valence::eeg {

enum class Band { kAlpha, kBeta1, kBeta2, kGamma };
inline constexpr size_t kBandCount = 4;

enum class Region {
  kPfLeft, kPfRight, kFMid, kCLeft, kCRight, kCMid, kPLeft, kPRight, kPoMid, kOLeft, kORight,
};
inline constexpr size_t kRegionCount = 11;

std::string_view name(Band band);
std::string_view name(Region region);
std::optional<Band> parse_band(std::string_view text);
std::optional<Region> parse_region(std::string_view text);

struct BandDef {
  Band band = Band::kAlpha;
  double lo = 0.0;
  double hi = 0.0;
};

struct RegionDef {
  Region region = Region::kPfLeft;
  std::vector<std::string> electrodes;
};

/// Band edges and region electrode sets; both are configurable.
struct Montage {
  std::array<BandDef, kBandCount> bands;
  std::array<RegionDef, kRegionCount> regions;

  static Montage standard();
  const BandDef& band(Band b) const { return bands[static_cast<size_t>(b)]; }
  const RegionDef& region(Region r) const { return regions[static_cast<size_t>(r)]; }
  /// Throws on invalid edges, unknown 10/10 labels or overlapping hemispheres.
  void validate() const;
};

bool is_1010_label(std::string_view label);

double band_power(const TimeSeries& ts, const BandDef& band, const WelchOptions& welch = {});

double region_power(const MultiChannelRecording& rec, const RegionDef& region, const BandDef& band,
                    const WelchOptions& welch = {});

struct FeatureSlot {
  Region region;
  Band band;
};

inline constexpr std::array<FeatureSlot, 20> kModelFeatures = {{
    {Region::kPfLeft, Band::kAlpha},  {Region::kPfLeft, Band::kBeta1},
    {Region::kPfLeft, Band::kBeta2},  {Region::kPfLeft, Band::kGamma},
    {Region::kPfRight, Band::kAlpha}, {Region::kPfRight, Band::kBeta1},
    {Region::kPfRight, Band::kBeta2}, {Region::kPfRight, Band::kGamma},
    {Region::kFMid, Band::kBeta1},    {Region::kFMid, Band::kGamma},
    {Region::kCMid, Band::kAlpha},    {Region::kCMid, Band::kBeta1},
    {Region::kPoMid, Band::kBeta1},   {Region::kPoMid, Band::kBeta2},
    {Region::kCLeft, Band::kGamma},   {Region::kCRight, Band::kGamma},
    {Region::kPRight, Band::kGamma},  {Region::kORight, Band::kBeta1},
    {Region::kORight, Band::kBeta2},  {Region::kORight, Band::kGamma},
}};

/// The 20 frequency-location powers (uV^2) in kModelFeatures order.
struct EegFeatureVector {
  std::array<double, 20> values{};
  static std::vector<std::string> names();
};

struct AsymmetryPair {
  Region left;
  Region right;
  Band band;
};

inline constexpr std::array<AsymmetryPair, 9> kAsymmetryPairs = {{
    {Region::kPfLeft, Region::kPfRight, Band::kAlpha},
    {Region::kPfLeft, Region::kPfRight, Band::kBeta1},
    {Region::kPfLeft, Region::kPfRight, Band::kBeta2},
    {Region::kPfLeft, Region::kPfRight, Band::kGamma},
    {Region::kCLeft, Region::kCRight, Band::kGamma},
    {Region::kPLeft, Region::kPRight, Band::kGamma},
    {Region::kOLeft, Region::kORight, Band::kBeta1},
    {Region::kOLeft, Region::kORight, Band::kBeta2},
    {Region::kOLeft, Region::kORight, Band::kGamma},
}};

std::string pair_name(const AsymmetryPair& pair);

/// Left and right region powers for each of the nine hemispheric pairs.
struct AsymmetryPowers {
  std::array<double, 9> left{};
  std::array<double, 9> right{};
};

struct WindowFeatures {
  EegFeatureVector model;
  AsymmetryPowers asymmetry;
};

/// Expects input already band-limited and CAR-referenced. Channels are found
/// by label, so file column order does not matter.
WindowFeatures extract_features(const MultiChannelRecording& rec, const Montage& montage,
                                const WelchOptions& welch = {});

EegFeatureVector extract_model_features(const MultiChannelRecording& rec, const Montage& montage,
                                        const WelchOptions& welch = {});

/// (right - left) / (right + left); unset when both powers are zero.
std::optional<double> asymmetry_index(double right_power, double left_power);

struct AsymmetryRow {
  AsymmetryPowers powers;
  Label label = Label::kPositive;
};

struct PairStats {
  std::string pair;
  double mean_ai_positive = 0.0;
  double mean_ai_negative = 0.0;
  size_t n_positive = 0;
  size_t n_negative = 0;
  stats::TestResult positive_vs_negative;
  stats::TestResult left_vs_right_positive;
  stats::TestResult left_vs_right_negative;
};

struct AsymmetryStats {
  std::vector<PairStats> pairs;
};

AsymmetryStats asymmetry_report(std::span<const AsymmetryRow> rows);

}  // namespace valence::eeg
