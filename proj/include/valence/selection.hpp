#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "valence/ml.hpp"

namespace valence::ml {

struct SaOptions {
  double t0 = 0.1;
  double alpha = 0.95;
  size_t iterations = 200;
};

struct SelectionResult {
  std::vector<bool> mask;
  std::vector<std::string> selected;
  double best_objective = 0.0;
  double baseline_objective = 0.0;  // all features
  size_t distinct_evaluations = 0;
  EvalReport report;  // cross-validation of the best mask
};

/// Simulated annealing over non-empty feature masks, maximising mean CV F1.
/// Starts from the all-features mask; each step flips one uniformly drawn
/// bit; worse moves are accepted with probability exp(-loss / T), T decays
/// geometrically. The best mask ever visited is returned. The objective is
/// cached per mask and every CV call uses the same seed, so the result
/// depends only on (matrix, options, seed).
SelectionResult sa_select(const FeatureMatrix& m, const ClassifierSpec& classifier,
                          const CvScheme& scheme, const SaOptions& options, std::uint64_t seed);

}  // namespace valence::ml
