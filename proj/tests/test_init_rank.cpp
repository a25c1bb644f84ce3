#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ballpark/featurize.hpp"
#include "ballpark/init_rank.hpp"

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

TEST_CASE("bag_means averages rows exactly") {
  FeatureMatrix m = dense_matrix({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  BagSet bags;
  bags.bags = {{"pair", {0, 1}}, {"single", {2}}};
  auto means = bag_means(m, bags);
  CHECK(means.means[0][0] == doctest::Approx(0.5));
  CHECK(means.means[0][1] == doctest::Approx(0.5));
  CHECK(means.means[1][0] == doctest::Approx(0.5));
  CHECK(means.means[1][1] == doctest::Approx(0.5));

  BagSet empty_bag;
  empty_bag.bags = {{"none", {}}};
  CHECK_THROWS_AS(bag_means(m, empty_bag), Error);
}

TEST_CASE("bias column mean is one for every bag") {
  FeatureMatrix raw = dense_matrix({{2.0}, {0.0}, {-3.0}});
  FeatureMatrix m = append_bias(raw);
  BagSet bags;
  bags.bags = {{"a", {0, 1}}, {"b", {0, 1, 2}}};
  auto means = bag_means(m, bags);
  for (const auto& mu : means.means)
    CHECK(mu[m.bias_index()] == doctest::Approx(1.0));
}

TEST_CASE("single ordering has the closed-form minimum-norm solution") {
  // mu1 = (1,0), mu2 = (0,1): min 1/2|w|^2 + max(0, 1 - w'd), d = (1,-1)
  // hinge goes inactive exactly at w = d/|d|^2 = (0.5, -0.5)
  BagMeanSet means;
  means.dim = 2;
  means.means = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<std::pair<std::size_t, std::size_t>> orderings{{0, 1}};
  Model w = solve_init(means, orderings, nullptr, {}, 0.0);
  CHECK(w.weights[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(w.weights[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("cyclic orderings cancel to w = 0") {
  BagMeanSet means;
  means.dim = 2;
  means.means = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<std::pair<std::size_t, std::size_t>> orderings{{0, 1}, {1, 0}};
  Model w = solve_init(means, orderings, nullptr, {}, 0.0);
  CHECK(std::fabs(w.weights[0]) < 1e-6);
  CHECK(std::fabs(w.weights[1]) < 1e-6);
}

TEST_CASE("no orderings falls back to a plain SVM on the labeled set") {
  BagMeanSet means;
  means.dim = 1;
  means.means = {{0.3}};
  FeatureMatrix labeled = dense_matrix({{1.0}, {-1.0}});
  std::vector<int> labels{+1, -1};
  Model w = solve_init(means, {}, &labeled, labels, 2000.0);
  // C_L/L = 1000 per instance: same KKT point as the two-point SVM
  CHECK(w.weights[0] == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_WITH_AS(solve_init(means, {}, nullptr, {}, 0.0),
                       doctest::Contains("nothing to initialize"), Error);
}

TEST_CASE("satisfiable independent orderings end up with zero slack") {
  BagMeanSet means;
  means.dim = 3;
  means.means = {{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.5}};
  std::vector<std::pair<std::size_t, std::size_t>> orderings{{0, 1}, {1, 2}};
  Model w = solve_init(means, orderings, nullptr, {}, 0.0, 1e-8);
  // margins w'(mu_k1 - mu_k2) >= 1 - 1e-6 when separable
  auto margin = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      s += w.weights[j] * (means.means[a][j] - means.means[b][j]);
    return s;
  };
  CHECK(margin(0, 1) >= 1.0 - 1e-6);
  CHECK(margin(1, 2) >= 1.0 - 1e-6);
}

TEST_CASE("duplicating an ordering only reweights by 1/|P|") {
  BagMeanSet means;
  means.dim = 2;
  means.means = {{1.0, 0.2}, {0.1, 0.9}};
  std::vector<std::pair<std::size_t, std::size_t>> once{{0, 1}};
  std::vector<std::pair<std::size_t, std::size_t>> twice{{0, 1}, {0, 1}};
  Model w1 = solve_init(means, once, nullptr, {}, 0.0, 1e-8);
  Model w2 = solve_init(means, twice, nullptr, {}, 0.0, 1e-8);
  // costs are 1/|P| each, so duplicates collapse to the identical objective
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(w1.weights[j] == doctest::Approx(w2.weights[j]).epsilon(1e-4));
}
