#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "valence/error.hpp"
#include "valence/ml.hpp"
#include "valence/random.hpp"
#include "valence/selection.hpp"
#include "valence/synth.hpp"

using namespace valence;
using namespace valence::ml;

namespace {

FeatureMatrix random_matrix(size_t n, size_t d, std::uint64_t seed, double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  FeatureMatrix m;
  for (size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
  for (size_t i = 0; i < n; ++i) {
    const Label label = i % 2 ? Label::kNegative : Label::kPositive;
    std::vector<double> row(d);
    for (size_t j = 0; j < d; ++j) row[j] = g(rng) * (1.0 + 0.3 * double(j)) + (label == Label::kPositive ? shift : 0.0);
    m.append_row(row, label, "S1", Sex::kMale, "t" + std::to_string(i));
  }
  return m;
}

// Plain majority vote over a full sort, as an independent reference.
Label brute_knn(const FeatureMatrix& train, std::span<const double> q, size_t k) {
  std::vector<std::pair<double, size_t>> dist;
  for (size_t i = 0; i < train.rows(); ++i) {
    double s = 0;
    for (size_t j = 0; j < q.size(); ++j) s += (train.at(i, j) - q[j]) * (train.at(i, j) - q[j]);
    dist.push_back({s, i});
  }
  std::sort(dist.begin(), dist.end());
  size_t pos = 0;
  for (size_t i = 0; i < k; ++i) pos += train.labels[dist[i].second] == Label::kPositive;
  if (2 * pos == k) return train.labels[dist[0].second];
  return 2 * pos > k ? Label::kPositive : Label::kNegative;
}

double eigen_discriminant(const FeatureMatrix& m, Label label, std::span<const double> q) {
  const size_t d = m.cols();
  std::vector<size_t> idx;
  for (size_t i = 0; i < m.rows(); ++i) {
    if (m.labels[i] == label) idx.push_back(i);
  }
  Eigen::MatrixXd x(idx.size(), d);
  for (size_t r = 0; r < idx.size(); ++r) {
    for (size_t j = 0; j < d; ++j) x(r, j) = m.at(idx[r], j);
  }
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mu;
  const Eigen::MatrixXd cov = centred.transpose() * centred / double(idx.size() - 1);
  Eigen::VectorXd diff(d);
  for (size_t j = 0; j < d; ++j) diff(j) = q[j] - mu(j);
  const Eigen::VectorXd sol = cov.fullPivLu().solve(diff);
  const double prior = double(idx.size()) / double(m.rows());
  return std::log(prior) - 0.5 * std::log(cov.determinant()) - 0.5 * diff.dot(sol);
}

}  // namespace

TEST_CASE("KNN hand example") {
  FeatureMatrix m;
  m.feature_names = {"x"};
  const std::vector<std::pair<double, Label>> pts = {
      {0, Label::kNegative}, {1, Label::kNegative}, {2, Label::kNegative},
      {9, Label::kPositive}, {10, Label::kPositive}, {11, Label::kPositive}, {12, Label::kNegative}};
  for (const auto& [x, l] : pts) m.append_row(std::vector<double>{x}, l, "S", Sex::kMale, "t");
  const auto model = knn_fit(m, 5);
  CHECK(knn_predict(model, std::vector<double>{10.0}) == Label::kPositive);
  CHECK(knn_predict(model, std::vector<double>{0.5}) == Label::kNegative);
  CHECK(knn_predict(knn_fit(m, 1), std::vector<double>{12.2}) == Label::kNegative);
}

TEST_CASE("KNN agrees with a brute-force vote") {
  const auto train = random_matrix(50, 5, 3, 0.7);
  const auto queries = random_matrix(200, 5, 4, 0.3);
  for (size_t k : {1u, 3u, 5u, 7u}) {
    const auto model = knn_fit(train, k);
    for (size_t i = 0; i < queries.rows(); ++i) {
      CHECK(knn_predict(model, queries.row(i)) == brute_knn(train, queries.row(i), k));
    }
  }
}

TEST_CASE("KNN refuses k larger than the training set") {
  const auto m = random_matrix(4, 2, 1);
  CHECK_THROWS_AS(knn_fit(m, 5), Error);
}

TEST_CASE("QDA one-dimensional boundary") {
  FeatureMatrix m;
  m.feature_names = {"x"};
  for (double x : {-1.0, 0.0, 1.0, -0.5, 0.5}) m.append_row(std::vector<double>{x}, Label::kNegative, "S", Sex::kMale, "n");
  for (double x : {9.0, 10.0, 11.0, 9.5, 10.5}) m.append_row(std::vector<double>{x}, Label::kPositive, "S", Sex::kMale, "p");
  const auto model = qda_fit(m);
  CHECK(qda_predict(model, std::vector<double>{4.0}) == Label::kNegative);
  CHECK(qda_predict(model, std::vector<double>{6.0}) == Label::kPositive);
  CHECK(model.classes[0].ridge == 0.0);
}

TEST_CASE("QDA discriminants match a dense Eigen solve") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = random_matrix(80, 4, seed, 0.5);
    const auto model = qda_fit(m);
    const auto queries = random_matrix(20, 4, seed + 100);
    for (size_t i = 0; i < queries.rows(); ++i) {
      const auto g = qda_discriminants(model, queries.row(i));
      CHECK(std::abs(g[0] - eigen_discriminant(m, Label::kPositive, queries.row(i))) <= 1e-8);
      CHECK(std::abs(g[1] - eigen_discriminant(m, Label::kNegative, queries.row(i))) <= 1e-8);
    }
  }
}

TEST_CASE("QDA regularises a singular covariance") {
  auto m = random_matrix(30, 3, 9);
  // Third column duplicates the first: rank-deficient in both classes.
  for (size_t i = 0; i < m.rows(); ++i) m.data[i * 3 + 2] = m.data[i * 3];
  const auto model = qda_fit(m);
  CHECK(model.classes[0].ridge > 0.0);
  CHECK(model.classes[1].ridge > 0.0);
  const auto g = qda_discriminants(model, m.row(0));
  CHECK(std::isfinite(g[0]));
  CHECK(std::isfinite(g[1]));
}

TEST_CASE("F1 score cases") {
  using L = Label;
  const std::vector<L> truth = {L::kPositive, L::kPositive, L::kNegative, L::kNegative};
  CHECK(f1_score(truth, truth) == 1.0);
  CHECK(f1_score(truth, std::vector<L>(4, L::kNegative)) == 0.0);
  CHECK(f1_score(truth, std::vector<L>(4, L::kPositive)) == doctest::Approx(2.0 / 3.0));
  CHECK(f1_score(truth, std::vector<L>{L::kPositive, L::kNegative, L::kPositive, L::kNegative}) == doctest::Approx(0.5));
}

TEST_CASE("standardizer uses training rows only") {
  FeatureMatrix m;
  m.feature_names = {"a", "b"};
  m.append_row(std::vector<double>{1, 5}, Label::kPositive, "S", Sex::kMale, "t1");
  m.append_row(std::vector<double>{3, 5}, Label::kNegative, "S", Sex::kMale, "t2");
  m.append_row(std::vector<double>{100, 7}, Label::kNegative, "S", Sex::kMale, "t3");
  const std::vector<size_t> train = {0, 1};
  const auto s = Standardizer::fit(m, train);
  CHECK(s.mean[0] == 2.0);
  CHECK(s.zero_variance[1]);
  const auto z = s.apply(m.row(2));
  CHECK(z[0] == doctest::Approx(98.0 / std::sqrt(2.0)));
  CHECK(z[1] == 0.0);
}

TEST_CASE("subject-dependent folds never split a trial") {
  synth::MatrixSpec spec;
  spec.subjects = 4;
  spec.trials_per_class = 7;
  spec.feature_names = {"a", "b"};
  auto base = synth::gen_feature_matrix(spec, 2);
  // Three windows per trial.
  FeatureMatrix m;
  m.feature_names = base.feature_names;
  for (size_t i = 0; i < base.rows(); ++i) {
    for (int w = 0; w < 3; ++w) m.append_row(base.row(i), base.labels[i], base.subject_ids[i], base.sex[i], base.trial_ids[i]);
  }
  const auto folds = make_folds(m, {SchemeKind::kSubjectDependent, 5}, 11);
  CHECK(folds.size() == 20);
  std::vector<int> tested(m.rows(), 0);
  for (const auto& f : folds) {
    std::set<std::string> test_trials;
    for (size_t i : f.test) {
      CHECK(m.subject_ids[i] == f.unit);
      test_trials.insert(m.trial_ids[i]);
      ++tested[i];
    }
    for (size_t i : f.train) {
      CHECK(m.subject_ids[i] == f.unit);
      CHECK(test_trials.count(m.trial_ids[i]) == 0);
    }
    size_t pos = 0;
    for (size_t i : f.test) pos += m.labels[i] == Label::kPositive;
    CHECK(pos > 0);
    CHECK(pos < f.test.size());
  }
  for (int t : tested) CHECK(t == 1);
  CHECK_THROWS_AS(make_folds(m, {SchemeKind::kSubjectDependent, 8}, 11), Error);
}

TEST_CASE("leave-one-subject-out has one unit per subject") {
  synth::MatrixSpec spec;
  spec.subjects = 5;
  spec.feature_names = {"a"};
  const auto m = synth::gen_feature_matrix(spec, 3);
  const auto folds = make_folds(m, {SchemeKind::kSubjectIndependent, 5}, 1);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) {
    for (size_t i : f.test) CHECK(m.subject_ids[i] == f.unit);
    for (size_t i : f.train) CHECK(m.subject_ids[i] != f.unit);
    CHECK(f.test.size() + f.train.size() == m.rows());
  }
  const auto r = cross_validate(m, {SchemeKind::kSubjectIndependent, 5}, {ClassifierKind::kKnn, 5}, 1);
  CHECK(r.per_unit.size() == 5);
}

TEST_CASE("cross-validation on pure noise sits near chance") {
  double total = 0;
  const int reps = 20;
  for (int seed = 0; seed < reps; ++seed) {
    synth::MatrixSpec spec;
    spec.subjects = 6;
    spec.trials_per_class = 10;
    spec.feature_names = {"a", "b", "c"};
    const auto m = synth::gen_feature_matrix(spec, std::uint64_t(seed));
    total += cross_validate(m, {SchemeKind::kSubjectDependent, 5}, {ClassifierKind::kKnn, 5}, 7).mean_f1;
  }
  const double avg = total / reps;
  CHECK(avg >= 0.35);
  CHECK(avg <= 0.65);
}

TEST_CASE("cross-validation on well separated classes") {
  synth::MatrixSpec spec;
  spec.subjects = 6;
  spec.trials_per_class = 10;
  spec.feature_names = {"a", "b"};
  spec.effects = {{"a", 6.0}, {"b", 6.0}};
  const auto m = synth::gen_feature_matrix(spec, 5);
  for (auto kind : {ClassifierKind::kKnn, ClassifierKind::kQda}) {
    for (auto scheme : {SchemeKind::kSubjectDependent, SchemeKind::kSubjectIndependent}) {
      CHECK(cross_validate(m, {scheme, 5}, {kind, 5}, 3).mean_f1 >= 0.95);
    }
  }
}

TEST_CASE("cross-validation is deterministic for a seed") {
  synth::MatrixSpec spec;
  spec.feature_names = {"a", "b", "c"};
  spec.effects = {{"a", 1.0}};
  const auto m = synth::gen_feature_matrix(spec, 8);
  const auto a = cross_validate(m, {SchemeKind::kSubjectDependent, 4}, {ClassifierKind::kQda, 5}, 42);
  const auto b = cross_validate(m, {SchemeKind::kSubjectDependent, 4}, {ClassifierKind::kQda, 5}, 42);
  CHECK(a.mean_f1 == b.mean_f1);
  CHECK(a.sd_f1 == b.sd_f1);
}

TEST_CASE("annealing with zero iterations keeps every feature") {
  synth::MatrixSpec spec;
  spec.feature_names = {"a", "b", "c"};
  const auto m = synth::gen_feature_matrix(spec, 1);
  SaOptions opt;
  opt.iterations = 0;
  const auto r = sa_select(m, {ClassifierKind::kKnn, 5}, {SchemeKind::kSubjectDependent, 4}, opt, 3);
  CHECK(r.selected.size() == 3);
  CHECK(r.best_objective == r.baseline_objective);
  CHECK(r.baseline_objective ==
        cross_validate(m, {SchemeKind::kSubjectDependent, 4}, {ClassifierKind::kKnn, 5}, derive_seed(3, "sa-cv")).mean_f1);
}

TEST_CASE("annealing keeps the predictive feature") {
  synth::MatrixSpec spec;
  spec.subjects = 6;
  spec.trials_per_class = 10;
  spec.feature_names = {"good", "noise"};
  spec.effects = {{"good", 3.0}};
  const auto m = synth::gen_feature_matrix(spec, 4);
  const auto r = sa_select(m, {ClassifierKind::kKnn, 5}, {SchemeKind::kSubjectDependent, 5}, {}, 9);
  CHECK(r.mask[0]);
  CHECK(r.best_objective >= r.baseline_objective);
  CHECK(r.report.mean_f1 == r.best_objective);
  CHECK(r.distinct_evaluations <= 3);
}

TEST_CASE("annealing never does worse than all features and is deterministic") {
  synth::MatrixSpec spec;
  spec.feature_names = {"a", "b", "c", "d", "e", "f"};
  const auto m = synth::gen_feature_matrix(spec, 12);
  SaOptions opt;
  opt.iterations = 60;
  const auto a = sa_select(m, {ClassifierKind::kQda, 5}, {SchemeKind::kSubjectDependent, 4}, opt, 5);
  const auto b = sa_select(m, {ClassifierKind::kQda, 5}, {SchemeKind::kSubjectDependent, 4}, opt, 5);
  CHECK(a.best_objective >= a.baseline_objective);
  CHECK(a.mask == b.mask);
  CHECK(a.best_objective == b.best_objective);
  CHECK_FALSE(a.selected.empty());
}
