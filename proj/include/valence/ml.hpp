#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "valence/signal.hpp"

namespace valence::ml {

/// Row-major n x d design matrix with per-row provenance. Labels are
/// Positive or Negative only.
struct FeatureMatrix {
  std::vector<double> data;
  std::vector<std::string> feature_names;
  std::vector<Label> labels;
  std::vector<std::string> subject_ids;
  std::vector<Sex> sex;
  std::vector<std::string> trial_ids;

  size_t rows() const { return labels.size(); }
  size_t cols() const { return feature_names.size(); }
  std::span<const double> row(size_t i) const { return {data.data() + i * cols(), cols()}; }
  double at(size_t i, size_t j) const { return data[i * cols() + j]; }

  void append_row(std::span<const double> values, Label label, std::string subject, Sex sex,
                  std::string trial_id);
  FeatureMatrix select_columns(const std::vector<bool>& mask) const;
  FeatureMatrix select_columns(const std::vector<std::string>& names) const;
  FeatureMatrix select_rows(std::span<const size_t> indices) const;
  /// Distinct subject ids in first-appearance order.
  std::vector<std::string> subjects() const;
  void validate() const;
};

/// Column means and sample SDs fitted on training rows. Zero-variance
/// columns map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<bool> zero_variance;

  static Standardizer fit(const FeatureMatrix& m, std::span<const size_t> rows);
  std::vector<double> apply(std::span<const double> row) const;
  FeatureMatrix apply(const FeatureMatrix& m, std::span<const size_t> rows) const;
};

struct KnnModel {
  size_t k = 5;
  size_t dims = 0;
  std::vector<double> points;
  std::vector<Label> labels;
};

KnnModel knn_fit(const FeatureMatrix& train, size_t k = 5);

/// Majority of the k nearest rows (Euclidean). Distance ties go to the lower
/// row index; vote ties go to the single nearest neighbour.
Label knn_predict(const KnnModel& model, std::span<const double> row);

struct QdaClass {
  Label label = Label::kPositive;
  std::vector<double> mean;
  std::vector<double> chol;  // lower-triangular factor of the covariance, row-major d x d
  double log_det = 0.0;
  double log_prior = 0.0;
  double ridge = 0.0;  // relative regularisation actually applied
};

struct QdaModel {
  size_t dims = 0;
  std::array<QdaClass, 2> classes;  // Positive, Negative
};

/// Per-class mean, sample covariance and class-fraction prior. A covariance
/// that is singular (or fitted from fewer than d + 2 rows) gets
/// lambda * trace / d on its diagonal, lambda escalating 1e-6 .. 1e-2.
QdaModel qda_fit(const FeatureMatrix& train);

/// log prior - 0.5 log|S| - 0.5 (x - mu)' S^-1 (x - mu), for {Positive, Negative}.
std::array<double, 2> qda_discriminants(const QdaModel& model, std::span<const double> row);

Label qda_predict(const QdaModel& model, std::span<const double> row);

/// F1 of the Positive class; 0 when there are no true positives.
double f1_score(std::span<const Label> truth, std::span<const Label> predicted);

enum class ClassifierKind { kKnn, kQda };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kKnn;
  size_t k = 5;
};

std::string to_string(const ClassifierSpec& spec);

enum class SchemeKind { kSubjectDependent, kSubjectIndependent };

struct CvScheme {
  SchemeKind kind = SchemeKind::kSubjectDependent;
  size_t folds = 5;
};

std::string to_string(SchemeKind kind);

struct Fold {
  std::string unit;  // subject id the fold is scored under
  std::vector<size_t> train;
  std::vector<size_t> test;
};

/// SI: leave one subject out. SD: per subject, trials (grouped by trial id)
/// split into stratified folds, shuffled with a per-subject stream.
std::vector<Fold> make_folds(const FeatureMatrix& m, const CvScheme& scheme, std::uint64_t seed);

struct UnitScore {
  std::string unit;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<UnitScore> per_unit;
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;
  std::vector<std::string> features;
  ClassifierSpec classifier;
  CvScheme scheme;
  std::uint64_t seed = 0;
};

EvalReport cross_validate(const FeatureMatrix& m, const CvScheme& scheme,
                          const ClassifierSpec& classifier, std::uint64_t seed);

}  // namespace valence::ml
