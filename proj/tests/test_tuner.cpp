#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <unordered_set>

#include "ballpark/expharness.hpp"
#include "ballpark/featurize.hpp"
#include "ballpark/rng.hpp"
#include "ballpark/tuner.hpp"

using namespace ballpark;

namespace {

FeatureMatrix column_matrix(const std::vector<double>& xs) {
  FeatureMatrix m(1);
  for (double x : xs) {
    if (x != 0.0) {
      m.add_row({std::pair<std::uint32_t, double>{0, x}});
    } else {
      m.add_row(std::vector<std::pair<std::uint32_t, double>>{});
    }
  }
  return m;
}

BagSet make_bags(std::vector<std::vector<std::size_t>> members) {
  BagSet bags;
  for (std::size_t k = 0; k < members.size(); ++k)
    bags.bags.push_back({"bag" + std::to_string(k), std::move(members[k])});
  return bags;
}

}  // namespace

TEST_CASE("split_bags partitions uniformly and deterministically") {
  BagSet bags = make_bags({{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}});
  CvPlan plan = split_bags(bags, 5, 42);
  REQUIRE(plan.heldout[0].size() == 5);
  std::set<std::size_t> all;
  for (const auto& part : plan.heldout[0]) {
    CHECK(part.size() == 2);  // near-equal parts
    for (std::size_t i : part) CHECK(all.insert(i).second);  // disjoint
  }
  CHECK(all.size() == 10);  // covering

  CvPlan again = split_bags(bags, 5, 42);
  CHECK(plan.heldout == again.heldout);
  CvPlan other = split_bags(bags, 5, 43);
  CHECK(plan.heldout != other.heldout);
}

TEST_CASE("small bags fall back to 50/50 splits with a warning") {
  BagSet bags = make_bags({{0, 1, 2}});
  CvPlan plan = split_bags(bags, 10, 7);
  CHECK_FALSE(plan.warnings.empty());
  for (const auto& part : plan.heldout[0]) {
    CHECK(part.size() == 1);  // 2 train / 1 held out
  }

  BagSet tiny = make_bags({{0}});
  CHECK_THROWS_AS(split_bags(tiny, 5, 1), Error);
}

TEST_CASE("violation_score measures bound deviations on held-out bags") {
  // predictions come from sign(w'x) with w = 1: x > 0 predicts +1
  std::vector<double> xs(10, 1.0);
  for (std::size_t i = 7; i < 10; ++i) xs[i] = -1.0;  // 7 positive, 3 negative
  FeatureMatrix m = column_matrix(xs);
  Model w;
  w.weights = {1.0};

  BagSet held = make_bags({{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}});
  ConstraintSet cons;
  cons.bounds = {{0, 0.2, 0.6}};
  CHECK(violation_score(w, held, cons, m) == doctest::Approx(0.1));  // p=0.7

  cons.bounds = {{0, 0.2, 0.8}};
  CHECK(violation_score(w, held, cons, m) == doctest::Approx(0.0));

  // two bags p = (0.1, 0.9) with bounds ([0.2,0.5],[0.5,0.8]) -> 0.1 mean
  std::vector<double> xs2;
  for (int i = 0; i < 10; ++i) xs2.push_back(i < 1 ? 1.0 : -1.0);   // bag a: 0.1
  for (int i = 0; i < 10; ++i) xs2.push_back(i < 9 ? 1.0 : -1.0);   // bag b: 0.9
  FeatureMatrix m2 = column_matrix(xs2);
  BagSet held2 = make_bags({{0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                            {10, 11, 12, 13, 14, 15, 16, 17, 18, 19}});
  ConstraintSet cons2;
  cons2.bounds = {{0, 0.2, 0.5}, {1, 0.5, 0.8}};
  CHECK(violation_score(w, held2, cons2, m2) == doctest::Approx(0.1));
}

TEST_CASE("select_C with vacuous bounds picks the smallest C with zero scores") {
  Rng rng(5);
  std::vector<double> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(rng.uniform(-1.0, 1.0));
  FeatureMatrix m = append_bias(column_matrix(xs));
  BagSet bags = make_bags({{}, {}});
  for (std::size_t i = 0; i < 20; ++i) bags.bags[0].members.push_back(i);
  for (std::size_t i = 20; i < 40; ++i) bags.bags[1].members.push_back(i);
  ConstraintSet cons;
  cons.bounds = {{0, 0.0, 1.0}, {1, 0.0, 1.0}};
  cons.extra_orderings = {{0, 1}};  // the initializer needs an ordering
  LabeledSet none;

  TunerInputs in;
  in.features = &m;
  in.bags = &bags;
  in.cons = &cons;
  in.labeled = &none;
  in.hp.max_outer_iters = 15;

  CvPlan plan = split_bags(bags, 3, 11);
  GridResult res = select_C({10.0, 0.01, 1.0}, in, plan);
  for (double v : res.mean_violation) CHECK(v == doctest::Approx(0.0));
  CHECK(res.selected_C == doctest::Approx(0.01));  // tie -> smallest C

  // selected C attains the minimum mean violation
  for (double v : res.mean_violation)
    CHECK(res.mean_violation[res.selected_index] <= v + 1e-12);

  // scores live in [0,1]
  for (const auto& per_c : res.cell_scores)
    for (const auto& s : per_c)
      if (s) {
        CHECK(*s >= 0.0);
        CHECK(*s <= 1.0);
      }
}

TEST_CASE("select_C argmin property on a constrained problem") {
  Rng rng(17);
  std::vector<double> xs;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < 30; ++i) {
    double v = (i < 15 ? 1.0 : -1.0) + 0.3 * rng.normal();
    xs.push_back(v);
    (i < 15 ? pos : neg).push_back(i);
  }
  FeatureMatrix m = append_bias(column_matrix(xs));
  BagSet bags = make_bags({pos, neg});
  ConstraintSet cons;
  cons.bounds = {{0, 0.6, 1.0}, {1, 0.0, 0.4}};
  cons.differences = {{0, 1, 0.3, 1.0}};
  LabeledSet none;

  TunerInputs in;
  in.features = &m;
  in.bags = &bags;
  in.cons = &cons;
  in.labeled = &none;
  in.hp.max_outer_iters = 20;

  CvPlan plan = split_bags(bags, 3, 23);
  GridResult res = select_C({0.1, 1.0, 10.0}, in, plan);
  for (double v : res.mean_violation)
    CHECK(res.mean_violation[res.selected_index] <= v + 1e-12);
}

TEST_CASE("empty grid is rejected") {
  TunerInputs in;
  FeatureMatrix m(1);
  BagSet bags;
  ConstraintSet cons;
  LabeledSet none;
  in.features = &m;
  in.bags = &bags;
  in.cons = &cons;
  in.labeled = &none;
  CvPlan plan;
  CHECK_THROWS_AS(select_C({}, in, plan), Error);
}
