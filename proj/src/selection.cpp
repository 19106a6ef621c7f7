#include "valence/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "valence/error.hpp"
#include "valence/random.hpp"

namespace valence::ml {

SelectionResult sa_select(const FeatureMatrix& m, const ClassifierSpec& classifier,
                          const CvScheme& scheme, const SaOptions& options, std::uint64_t seed) {
  const size_t d = m.cols();
  require(d >= 2, "feature selection needs at least two features");
  require(options.t0 > 0.0, "initial temperature must be positive");
  require(options.alpha > 0.0 && options.alpha < 1.0, "cooling factor must lie in (0, 1)");

  const std::uint64_t cv_seed = derive_seed(seed, "sa-cv");
  std::map<std::vector<bool>, double> cache;
  auto objective = [&](const std::vector<bool>& mask) {
    if (auto it = cache.find(mask); it != cache.end()) return it->second;
    const double f = cross_validate(m.select_columns(mask), scheme, classifier, cv_seed).mean_f1;
    cache.emplace(mask, f);
    return f;
  };

  std::mt19937_64 rng(derive_seed(seed, "sa-chain"));
  std::uniform_int_distribution<size_t> pick(0, d - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<bool> current(d, true);
  double current_f = objective(current);
  SelectionResult result;
  result.baseline_objective = current_f;
  result.mask = current;
  result.best_objective = current_f;

  double temperature = options.t0;
  for (size_t it = 0; it < options.iterations; ++it) {
    std::vector<bool> candidate = current;
    size_t bit = pick(rng);
    candidate[bit] = !candidate[bit];
    while (std::find(candidate.begin(), candidate.end(), true) == candidate.end()) {
      candidate = current;
      bit = pick(rng);
      candidate[bit] = !candidate[bit];
    }
    const double f = objective(candidate);
    const double gain = f - current_f;
    const double u = unit(rng);
    if (gain >= 0.0 || u < std::exp(gain / temperature)) {
      current = std::move(candidate);
      current_f = f;
      if (current_f > result.best_objective) {
        result.best_objective = current_f;
        result.mask = current;
      }
    }
    temperature *= options.alpha;
  }

  for (size_t j = 0; j < d; ++j) {
    if (result.mask[j]) result.selected.push_back(m.feature_names[j]);
  }
  result.distinct_evaluations = cache.size();
  result.report = cross_validate(m.select_columns(result.mask), scheme, classifier, cv_seed);
  return result;
}

}  // namespace valence::ml
