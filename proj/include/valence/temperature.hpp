#pragma once

#include <span>
#include <string>

#include "valence/signal.hpp"

namespace valence::temperature {

struct TempTrialFeature {
  double mean_temp = 0.0;  // degrees C
  size_t n_outliers_replaced = 0;
  std::string trial_id;
  Label label = Label::kBaseline;
};

inline constexpr double kMinPlausibleC = 15.0;
inline constexpr double kMaxPlausibleC = 45.0;

/// Mean of a segment after scaled-MAD outlier replacement.
double robust_mean(std::span<const double> segment, size_t* n_replaced = nullptr);

/// Cuts [trial.start, trial.start + trial.duration) out of `ts` and summarises it.
TempTrialFeature temp_trial_feature(const TimeSeries& ts, const TrialSpec& trial);

}  // namespace valence::temperature
