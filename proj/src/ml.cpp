#include "valence/ml.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "valence/descriptive.hpp"
#include "valence/error.hpp"
#include "valence/random.hpp"

namespace valence::ml {

void FeatureMatrix::append_row(std::span<const double> values, Label label, std::string subject,
                               Sex row_sex, std::string trial_id) {
  require(values.size() == cols(), "row width does not match the feature count");
  require(label != Label::kBaseline, "baseline rows are not classification samples");
  data.insert(data.end(), values.begin(), values.end());
  labels.push_back(label);
  subject_ids.push_back(std::move(subject));
  sex.push_back(row_sex);
  trial_ids.push_back(std::move(trial_id));
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<bool>& mask) const {
  require(mask.size() == cols(), "column mask width mismatch");
  FeatureMatrix out;
  out.labels = labels;
  out.subject_ids = subject_ids;
  out.sex = sex;
  out.trial_ids = trial_ids;
  for (size_t j = 0; j < cols(); ++j) {
    if (mask[j]) out.feature_names.push_back(feature_names[j]);
  }
  out.data.reserve(rows() * out.cols());
  for (size_t i = 0; i < rows(); ++i) {
    for (size_t j = 0; j < cols(); ++j) {
      if (mask[j]) out.data.push_back(at(i, j));
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
  std::vector<bool> mask(cols(), false);
  for (const auto& n : names) {
    const auto it = std::find(feature_names.begin(), feature_names.end(), n);
    require(it != feature_names.end(), "unknown feature '" + n + "'");
    mask[static_cast<size_t>(it - feature_names.begin())] = true;
  }
  return select_columns(mask);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const size_t> indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  for (size_t i : indices) {
    require(i < rows(), "row index out of range");
    const auto r = row(i);
    out.data.insert(out.data.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    out.subject_ids.push_back(subject_ids[i]);
    out.sex.push_back(sex[i]);
    out.trial_ids.push_back(trial_ids[i]);
  }
  return out;
}

std::vector<std::string> FeatureMatrix::subjects() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : subject_ids) {
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

void FeatureMatrix::validate() const {
  require(data.size() == rows() * cols(), "matrix storage does not match its shape");
  require(subject_ids.size() == rows() && sex.size() == rows() && trial_ids.size() == rows(),
          "row metadata length mismatch");
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  require(names.size() == feature_names.size(), "feature names must be unique");
  for (double v : data) require(std::isfinite(v), "feature matrix contains a non-finite value");
  for (Label l : labels) require(l != Label::kBaseline, "baseline rows are not classification samples");
}

Standardizer Standardizer::fit(const FeatureMatrix& m, std::span<const size_t> rows) {
  require(rows.size() >= 2, "standardisation needs at least two rows");
  Standardizer s;
  const size_t d = m.cols();
  s.mean.assign(d, 0.0);
  s.sd.assign(d, 0.0);
  s.zero_variance.assign(d, false);
  std::vector<double> col(rows.size());
  for (size_t j = 0; j < d; ++j) {
    for (size_t r = 0; r < rows.size(); ++r) col[r] = m.at(rows[r], j);
    s.mean[j] = valence::mean(col);
    s.sd[j] = sample_sd(col);
    s.zero_variance[j] = !(s.sd[j] > 0.0);
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (size_t j = 0; j < row.size(); ++j) {
    out[j] = zero_variance[j] ? 0.0 : (row[j] - mean[j]) / sd[j];
  }
  return out;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& m, std::span<const size_t> rows) const {
  FeatureMatrix out = m.select_rows(rows);
  for (size_t i = 0; i < out.rows(); ++i) {
    const auto z = apply(out.row(i));
    std::copy(z.begin(), z.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * out.cols()));
  }
  return out;
}

KnnModel knn_fit(const FeatureMatrix& train, size_t k) {
  require(k >= 1, "k must be positive");
  if (k > train.rows()) {
    fail(ErrorCode::kInfeasible, "k = " + std::to_string(k) + " exceeds the " +
                                     std::to_string(train.rows()) + " training rows");
  }
  return {k, train.cols(), train.data, train.labels};
}

Label knn_predict(const KnnModel& model, std::span<const double> row) {
  require(row.size() == model.dims, "query width does not match the model");
  const size_t n = model.labels.size();
  std::vector<std::pair<double, size_t>> dist(n);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* p = model.points.data() + i * model.dims;
    for (size_t j = 0; j < model.dims; ++j) {
      const double diff = p[j] - row[j];
      acc += diff * diff;
    }
    dist[i] = {acc, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());
  int votes = 0;
  for (size_t i = 0; i < model.k; ++i) votes += model.labels[dist[i].second] == Label::kPositive ? 1 : -1;
  if (votes > 0) return Label::kPositive;
  if (votes < 0) return Label::kNegative;
  return model.labels[dist.front().second];
}

namespace {

// In-place Cholesky of a symmetric d x d matrix; false if not positive definite.
bool cholesky(std::vector<double>& a, size_t d) {
  double max_diag = 0.0;
  for (size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, std::abs(a[i * d + i]));
  const double tol = 1e-12 * std::max(max_diag, 1e-300);
  for (size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (!(diag > tol) || !std::isfinite(diag)) return false;
    const double l = std::sqrt(diag);
    a[j * d + j] = l;
    for (size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / l;
    }
    for (size_t i = 0; i < j; ++i) a[i * d + j] = 0.0;
  }
  return true;
}

QdaClass fit_class(const FeatureMatrix& train, Label label) {
  const size_t d = train.cols();
  std::vector<size_t> idx;
  for (size_t i = 0; i < train.rows(); ++i) {
    if (train.labels[i] == label) idx.push_back(i);
  }
  if (idx.size() < 2) {
    fail(ErrorCode::kInfeasible, std::string("QDA needs at least two ") + to_string(label) + " rows");
  }
  QdaClass c;
  c.label = label;
  c.mean.assign(d, 0.0);
  for (size_t i : idx) {
    for (size_t j = 0; j < d; ++j) c.mean[j] += train.at(i, j);
  }
  for (double& m : c.mean) m /= static_cast<double>(idx.size());

  std::vector<double> cov(d * d, 0.0);
  for (size_t i : idx) {
    for (size_t a = 0; a < d; ++a) {
      const double da = train.at(i, a) - c.mean[a];
      for (size_t b = 0; b <= a; ++b) cov[a * d + b] += da * (train.at(i, b) - c.mean[b]);
    }
  }
  for (size_t a = 0; a < d; ++a) {
    for (size_t b = 0; b <= a; ++b) {
      cov[a * d + b] /= static_cast<double>(idx.size() - 1);
      cov[b * d + a] = cov[a * d + b];
    }
  }
  double trace = 0.0;
  for (size_t a = 0; a < d; ++a) trace += cov[a * d + a];
  // A class constant in every feature has no scale to borrow; fall back to unit.
  const double scale = trace > 0.0 ? trace / static_cast<double>(d) : 1.0;

  std::vector<double> ridges;
  if (idx.size() >= d + 2) ridges.push_back(0.0);
  for (double r = 1e-6; r <= 1e-2 * 1.0001; r *= 10.0) ridges.push_back(r);
  for (double ridge : ridges) {
    std::vector<double> a = cov;
    for (size_t j = 0; j < d; ++j) a[j * d + j] += ridge * scale;
    if (cholesky(a, d)) {
      c.chol = std::move(a);
      c.ridge = ridge;
      c.log_det = 0.0;
      for (size_t j = 0; j < d; ++j) c.log_det += 2.0 * std::log(c.chol[j * d + j]);
      return c;
    }
  }
  fail(ErrorCode::kNumerical, std::string("singular ") + to_string(label) +
                                  " covariance after regularisation");
}

}  // namespace

QdaModel qda_fit(const FeatureMatrix& train) {
  require(train.cols() >= 1, "QDA needs at least one feature");
  QdaModel model;
  model.dims = train.cols();
  model.classes = {fit_class(train, Label::kPositive), fit_class(train, Label::kNegative)};
  const auto n = static_cast<double>(train.rows());
  for (auto& c : model.classes) {
    const auto count = static_cast<double>(std::count(train.labels.begin(), train.labels.end(), c.label));
    c.log_prior = std::log(count / n);
  }
  return model;
}

std::array<double, 2> qda_discriminants(const QdaModel& model, std::span<const double> row) {
  require(row.size() == model.dims, "query width does not match the model");
  const size_t d = model.dims;
  std::array<double, 2> out{};
  std::vector<double> z(d);
  for (size_t c = 0; c < 2; ++c) {
    const auto& cls = model.classes[c];
    // Forward substitution L z = x - mu gives the Mahalanobis term as |z|^2.
    double maha = 0.0;
    for (size_t i = 0; i < d; ++i) {
      double v = row[i] - cls.mean[i];
      for (size_t k = 0; k < i; ++k) v -= cls.chol[i * d + k] * z[k];
      z[i] = v / cls.chol[i * d + i];
      maha += z[i] * z[i];
    }
    out[c] = cls.log_prior - 0.5 * cls.log_det - 0.5 * maha;
  }
  return out;
}

Label qda_predict(const QdaModel& model, std::span<const double> row) {
  const auto g = qda_discriminants(model, row);
  if (g[0] == g[1]) {
    return model.classes[0].log_prior >= model.classes[1].log_prior ? Label::kPositive : Label::kNegative;
  }
  return g[0] > g[1] ? Label::kPositive : Label::kNegative;
}

double f1_score(std::span<const Label> truth, std::span<const Label> predicted) {
  require(truth.size() == predicted.size(), "label vectors differ in length");
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == Label::kPositive;
    const bool p = predicted[i] == Label::kPositive;
    if (t && p) ++tp;
    else if (!t && p) ++fp;
    else if (t && !p) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

std::string to_string(const ClassifierSpec& spec) {
  return spec.kind == ClassifierKind::kQda ? "QDA" : "KNN" + std::to_string(spec.k);
}

std::string to_string(SchemeKind kind) {
  return kind == SchemeKind::kSubjectDependent ? "SD" : "SI";
}

std::vector<Fold> make_folds(const FeatureMatrix& m, const CvScheme& scheme, std::uint64_t seed) {
  const auto subjects = m.subjects();
  std::vector<Fold> folds;
  if (scheme.kind == SchemeKind::kSubjectIndependent) {
    if (subjects.size() < 2) fail(ErrorCode::kInfeasible, "leave-one-subject-out needs two subjects");
    for (const auto& s : subjects) {
      Fold f{s, {}, {}};
      for (size_t i = 0; i < m.rows(); ++i) (m.subject_ids[i] == s ? f.test : f.train).push_back(i);
      folds.push_back(std::move(f));
    }
    return folds;
  }

  require(scheme.folds >= 2, "subject-dependent CV needs at least two folds");
  for (const auto& s : subjects) {
    // Trial groups per class, in first-appearance order.
    std::map<std::string, std::vector<size_t>> rows_of_trial;
    std::array<std::vector<std::string>, 2> trials_by_class;
    for (size_t i = 0; i < m.rows(); ++i) {
      if (m.subject_ids[i] != s) continue;
      auto [it, inserted] = rows_of_trial.try_emplace(m.trial_ids[i]);
      it->second.push_back(i);
      if (inserted) trials_by_class[m.labels[i] == Label::kPositive ? 0 : 1].push_back(m.trial_ids[i]);
    }
    for (const auto& group : trials_by_class) {
      if (group.size() < scheme.folds) {
        fail(ErrorCode::kInfeasible, "subject " + s + " has fewer trials per class than folds (" +
                                         std::to_string(group.size()) + " < " +
                                         std::to_string(scheme.folds) + ")");
      }
    }
    std::mt19937_64 rng(derive_seed(seed, "sd-folds:" + s));
    std::map<std::string, size_t> fold_of;
    for (auto& group : trials_by_class) {
      std::shuffle(group.begin(), group.end(), rng);
      for (size_t j = 0; j < group.size(); ++j) fold_of[group[j]] = j % scheme.folds;
    }
    for (size_t k = 0; k < scheme.folds; ++k) {
      Fold f{s, {}, {}};
      for (const auto& [trial, rows] : rows_of_trial) {
        auto& dst = fold_of[trial] == k ? f.test : f.train;
        dst.insert(dst.end(), rows.begin(), rows.end());
      }
      std::sort(f.train.begin(), f.train.end());
      std::sort(f.test.begin(), f.test.end());
      folds.push_back(std::move(f));
    }
  }
  return folds;
}

EvalReport cross_validate(const FeatureMatrix& m, const CvScheme& scheme,
                          const ClassifierSpec& classifier, std::uint64_t seed) {
  m.validate();
  require(m.cols() >= 1, "cross-validation needs at least one feature");
  const auto folds = make_folds(m, scheme, seed);

  std::vector<std::string> units;
  std::map<std::string, std::pair<double, size_t>> acc;
  for (const auto& fold : folds) {
    const Standardizer scaler = Standardizer::fit(m, fold.train);
    const FeatureMatrix train = scaler.apply(m, fold.train);
    const FeatureMatrix test = scaler.apply(m, fold.test);
    std::vector<Label> predicted(test.rows());
    if (classifier.kind == ClassifierKind::kKnn) {
      const KnnModel model = knn_fit(train, classifier.k);
      for (size_t i = 0; i < test.rows(); ++i) predicted[i] = knn_predict(model, test.row(i));
    } else {
      const QdaModel model = qda_fit(train);
      for (size_t i = 0; i < test.rows(); ++i) predicted[i] = qda_predict(model, test.row(i));
    }
    auto [it, inserted] = acc.try_emplace(fold.unit, 0.0, 0);
    if (inserted) units.push_back(fold.unit);
    it->second.first += f1_score(test.labels, predicted);
    it->second.second += 1;
  }

  EvalReport report;
  report.features = m.feature_names;
  report.classifier = classifier;
  report.scheme = scheme;
  report.seed = seed;
  std::vector<double> scores;
  for (const auto& u : units) {
    const auto& [sum, count] = acc.at(u);
    report.per_unit.push_back({u, sum / static_cast<double>(count)});
    scores.push_back(report.per_unit.back().f1);
  }
  report.mean_f1 = mean(scores);
  report.sd_f1 = scores.size() >= 2 ? sample_sd(scores) : 0.0;
  return report;
}

}  // namespace valence::ml
