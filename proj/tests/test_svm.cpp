#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ballpark/rng.hpp"
#include "ballpark/svm.hpp"

using namespace ballpark;

namespace {

FeatureMatrix dense_matrix(const std::vector<std::vector<double>>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  FeatureMatrix m(cols);
  for (const auto& r : rows) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::uint32_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) entries.emplace_back(j, r[j]);
    m.add_row(entries);
  }
  return m;
}

}  // namespace

TEST_CASE("two separable points recover the KKT optimum") {
  // x=+1 labeled +1, x=-1 labeled -1, heavy cost: constraint w >= 1 active,
  // minimizer of w^2/2 is w = 1
  FeatureMatrix m = dense_matrix({{1.0}, {-1.0}});
  SvmProblem p{&m, {1.0, -1.0}, {1000.0, 1000.0}};
  auto res = train_svm(p, 1e-6, 5000, 3);
  CHECK(res.model.weights[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.rel_gap <= 1e-6);
}

TEST_CASE("vanishing costs drive w to zero") {
  FeatureMatrix m = dense_matrix({{1.0}, {-1.0}});
  SvmProblem p{&m, {1.0, -1.0}, {1e-8, 1e-8}};
  auto res = train_svm(p, 1e-6, 5000, 3);
  CHECK(std::fabs(res.model.weights[0]) < 1e-6);
}

TEST_CASE("splitting a row's cost in half leaves the optimum unchanged") {
  FeatureMatrix m1 = dense_matrix({{1.0, 0.5}, {-0.5, -1.0}, {0.3, 0.3}});
  SvmProblem p1{&m1, {1.0, -1.0, 1.0}, {2.0, 1.0, 1.5}};
  FeatureMatrix m2 = dense_matrix(
      {{1.0, 0.5}, {-0.5, -1.0}, {0.3, 0.3}, {1.0, 0.5}});
  SvmProblem p2{&m2, {1.0, -1.0, 1.0, 1.0}, {1.0, 1.0, 1.5, 1.0}};
  auto r1 = train_svm(p1, 1e-7, 20000, 5);
  auto r2 = train_svm(p2, 1e-7, 20000, 5);
  CHECK(svm_primal_objective(p1, r1.model) ==
        doctest::Approx(svm_primal_objective(p2, r2.model)).epsilon(1e-4));
}

TEST_CASE("zero-cost rows have no influence") {
  FeatureMatrix m1 = dense_matrix({{1.0, -0.2}, {-0.7, 1.0}});
  SvmProblem p1{&m1, {1.0, -1.0}, {1.0, 1.0}};
  FeatureMatrix m2 = dense_matrix({{1.0, -0.2}, {-0.7, 1.0}, {9.0, 9.0}});
  SvmProblem p2{&m2, {1.0, -1.0, 1.0}, {1.0, 1.0, 0.0}};
  auto r1 = train_svm(p1, 1e-7, 20000, 11);
  auto r2 = train_svm(p2, 1e-7, 20000, 11);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(r1.model.weights[j] == doctest::Approx(r2.model.weights[j]).epsilon(1e-5));
  CHECK_THROWS_AS(train_svm(SvmProblem{&m1, {1.0, -1.0}, {0.0, 0.0}}, 1e-4, 10, 1),
                  Error);
}

TEST_CASE("decision_values and the tie rule") {
  FeatureMatrix m = dense_matrix({{0.0, 2.0}, {0.0, 0.0}, {1.0, -1.0}});
  Model w;
  w.weights = {0.0, 1.0};
  auto d = decision_values(w, m);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(0.0));
  auto labels = predict_labels(w, m);
  CHECK(labels[0] == 1);
  CHECK(labels[1] == 1);  // sign(0) -> +1
  CHECK(labels[2] == -1);

  Model zero;
  zero.weights = {0.0, 0.0};
  auto z = predict_labels(zero, m);
  CHECK(z == std::vector<int>{1, 1, 1});

  // positive scaling preserves predictions
  Model scaled;
  scaled.weights = {0.0, 7.5};
  auto dv = decision_values(scaled, m);
  for (std::size_t i = 0; i < 3; ++i) CHECK(dv[i] == doctest::Approx(7.5 * d[i]));
  CHECK(predict_labels(scaled, m) == labels);

  Model wrong;
  wrong.weights = {1.0};
  CHECK_THROWS_AS(decision_values(wrong, m), Error);
}

TEST_CASE("class_weighted_costs follows inverse class frequency") {
  std::vector<int> labels{1, 1, 1, -1};
  auto c = class_weighted_costs(labels, 1.0);
  CHECK(c[0] == doctest::Approx(2.0 / 3.0));
  CHECK(c[1] == doctest::Approx(2.0 / 3.0));
  CHECK(c[2] == doctest::Approx(2.0 / 3.0));
  CHECK(c[3] == doctest::Approx(2.0));

  std::vector<int> balanced{1, -1, 1, -1};
  auto cb = class_weighted_costs(balanced, 3.0);
  for (double v : cb) CHECK(v == doctest::Approx(3.0));

  std::vector<int> single{1, 1};
  CHECK_THROWS_AS(class_weighted_costs(single, 1.0), Error);
}

TEST_CASE("random problems: duality gap, objective bound, permutation invariance") {
  Rng rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    std::size_t n = 3 + rng.next_below(40);
    std::size_t dim = 2 + rng.next_below(8);
    std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
    SvmProblem p;
    p.labels.resize(n);
    p.costs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : rows[i]) v = rng.uniform(-2.0, 2.0);
      p.labels[i] = rng.next_below(2) == 0 ? 1.0 : -1.0;
      p.costs[i] = rng.uniform(0.01, 3.0);
    }
    FeatureMatrix m = dense_matrix(rows);
    p.features = &m;
    auto res = train_svm(p, 1e-4, 5000, rep + 1);
    CHECK(res.rel_gap <= 1e-3);

    // primal of the result never exceeds primal of w = 0 (= sum of costs)
    double at_zero = 0.0;
    for (double ci : p.costs) at_zero += ci;
    CHECK(svm_primal_objective(p, res.model) <= at_zero + 1e-9);

    // permuting rows leaves the optimum objective unchanged
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::vector<double>> prows(n);
    SvmProblem pp;
    pp.labels.resize(n);
    pp.costs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      prows[i] = rows[perm[i]];
      pp.labels[i] = p.labels[perm[i]];
      pp.costs[i] = p.costs[perm[i]];
    }
    FeatureMatrix pm = dense_matrix(prows);
    pp.features = &pm;
    auto pres = train_svm(pp, 1e-7, 20000, rep + 1000);
    auto res7 = train_svm(p, 1e-7, 20000, rep + 2000);
    CHECK(svm_primal_objective(pp, pres.model) ==
          doctest::Approx(svm_primal_objective(p, res7.model)).epsilon(1e-6));
  }
}

TEST_CASE("continuous labels train through the same path") {
  // y in [-1,1] scales the rows; small |y| rows act as weak, capped pulls
  FeatureMatrix m = dense_matrix({{1.0}, {-1.0}, {0.8}});
  SvmProblem p{&m, {0.5, -1.0, 0.0}, {2.0, 2.0, 2.0}};
  auto res = train_svm(p, 1e-6, 5000, 4);
  CHECK(res.rel_gap <= 1e-6);
  CHECK(std::isfinite(res.model.weights[0]));
}
