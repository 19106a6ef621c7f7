#include "valence/temperature.hpp"

#include <numeric>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"

namespace valence::temperature {

double robust_mean(std::span<const double> segment, size_t* n_replaced) {
  if (segment.size() < 3) {
    if (n_replaced != nullptr) *n_replaced = 0;
    return mean(segment);
  }
  const auto cleaned = mad_outlier_replace(segment);
  if (n_replaced != nullptr) *n_replaced = cleaned.count();
  return mean(cleaned.values);
}

TempTrialFeature temp_trial_feature(const TimeSeries& ts, const TrialSpec& trial) {
  require(ts.unit == Unit::kCelsius, "temperature series must be in degrees Celsius");
  const TimeSeries seg = slice(ts, trial.start, trial.duration);
  TempTrialFeature out;
  out.trial_id = trial.trial_id;
  out.label = trial.label;
  out.mean_temp = robust_mean(seg.samples, &out.n_outliers_replaced);
  if (out.mean_temp < kMinPlausibleC || out.mean_temp > kMaxPlausibleC) {
    fail(ErrorCode::kInvalidArgument, "trial '" + trial.trial_id + "' mean temperature " +
                                          std::to_string(out.mean_temp) + " C is implausible");
  }
  return out;
}

}  // namespace valence::temperature
