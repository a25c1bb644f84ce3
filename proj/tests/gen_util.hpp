// Shared random-problem generators for the label-step and alternation tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ballpark/rng.hpp"
#include "ballpark/types.hpp"

namespace gen {

struct LabelProblem {
  std::vector<double> margins;
  ballpark::BagSet bags;
  ballpark::ConstraintSet cons;
  ballpark::LabeledSet labeled;
};

// Small instance with <= max_vars constrained variables across <= 2 bags.
// Bounds are sampled around a random reference label vector so most problems
// are feasible; `adversarial` draws unrelated bounds instead (often
// infeasible) to exercise both statuses.
inline LabelProblem random_label_problem(ballpark::Rng& rng,
                                         std::size_t max_vars = 6,
                                         bool adversarial = false) {
  using namespace ballpark;
  LabelProblem p;
  const std::size_t n_con = 1 + rng.next_below(max_vars);
  const std::size_t n_extra = rng.next_below(4);
  const std::size_t n = n_con + n_extra;
  const std::size_t n_labeled = rng.next_below(2);

  p.margins.resize(n);
  for (auto& m : p.margins) {
    switch (rng.next_below(10)) {
      case 0: m = 0.0; break;
      case 1: m = rng.uniform(-0.5, 0.5); break;
      default: m = rng.uniform(-3.0, 3.0);
    }
  }
  for (std::size_t j = 0; j < n_labeled; ++j)
    p.labeled.entries.emplace_back(n + j, rng.next_below(2) == 0 ? +1 : -1);

  const std::size_t n_bags = 1 + rng.next_below(2);
  p.bags.bags.resize(n_bags);
  for (std::size_t k = 0; k < n_bags; ++k)
    p.bags.bags[k].name = "bag" + std::to_string(k);
  for (std::size_t i = 0; i < n_con; ++i)
    p.bags.bags[rng.next_below(n_bags)].members.push_back(i);
  // extra overlaps
  for (std::size_t i = 0; i < n_con; ++i)
    if (rng.next_below(3) == 0)
      for (std::size_t k = 0; k < n_bags; ++k) {
        auto& mem = p.bags.bags[k].members;
        if (std::find(mem.begin(), mem.end(), i) == mem.end() &&
            rng.next_below(2) == 0)
          mem.push_back(i);
      }
  // labeled members join a bag half the time
  for (std::size_t j = 0; j < n_labeled; ++j)
    if (rng.next_below(2) == 0)
      p.bags.bags[rng.next_below(n_bags)].members.push_back(n + j);
  for (std::size_t k = 0; k < n_bags; ++k) {
    if (p.bags.bags[k].members.empty())
      p.bags.bags[k].members.push_back(rng.next_below(n_con));
    std::sort(p.bags.bags[k].members.begin(), p.bags.bags[k].members.end());
    p.bags.bags[k].members.erase(std::unique(p.bags.bags[k].members.begin(),
                                             p.bags.bags[k].members.end()),
                                 p.bags.bags[k].members.end());
  }

  // reference labels for calibrated, usually-feasible bounds
  LabelVector ref;
  for (std::size_t i = 0; i < n; ++i) ref.values.push_back(rng.uniform(-1.0, 1.0));
  auto clip = [](double v) { return std::min(1.0, std::max(0.0, v)); };

  for (std::size_t k = 0; k < n_bags; ++k) {
    if (rng.next_below(10) < 8) {
      BoundConstraint b;
      b.bag = k;
      if (adversarial) {
        double a = rng.uniform(0.0, 1.0);
        b.lower = a;
        b.upper = std::min(1.0, a + rng.uniform(0.0, 0.15));
      } else {
        double ph = estimated_proportion(ref, p.labeled, p.bags[k]);
        if (rng.next_below(8) == 0) {
          b.lower = b.upper = clip(ph);  // equality bound, still feasible
        } else {
          b.lower = clip(ph - rng.uniform(0.0, 0.5));
          b.upper = clip(ph + rng.uniform(0.0, 0.5));
        }
      }
      p.cons.bounds.push_back(b);
    }
  }
  if (n_bags == 2 && rng.next_below(2) == 0) {
    double p0 = estimated_proportion(ref, p.labeled, p.bags[0]);
    double p1 = estimated_proportion(ref, p.labeled, p.bags[1]);
    DifferenceConstraint d;
    d.upper_bag = p0 >= p1 ? 0 : 1;
    d.lower_bag = p0 >= p1 ? 1 : 0;
    double delta = std::fabs(p0 - p1);
    if (adversarial) {
      d.lower = clip(rng.uniform(0.4, 1.0));
      d.upper = clip(d.lower + rng.uniform(0.0, 0.5));
    } else {
      d.lower = clip(delta - rng.uniform(0.0, 0.3));
      d.upper = clip(delta + rng.uniform(0.0, 0.3));
    }
    p.cons.differences.push_back(d);
  }
  return p;
}

}  // namespace gen
