#include "ballpark/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ballpark/rng.hpp"

namespace ballpark {

CvPlan split_bags(const BagSet& bags, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error("split_bags: need at least 2 folds");
  CvPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.heldout.resize(bags.size());

  for (std::size_t k = 0; k < bags.size(); ++k) {
    const auto& members = bags[k].members;
    if (members.size() < 2)
      throw Error("split_bags: bag '" + bags[k].name + "' has fewer than 2 members");
    plan.heldout[k].resize(n_folds);

    if (members.size() >= n_folds) {
      std::vector<std::size_t> perm = members;
      Rng rng = Rng::derive(seed, k);
      rng.shuffle(perm);
      for (std::size_t f = 0; f < n_folds; ++f) {
        std::size_t b = f * perm.size() / n_folds;
        std::size_t e = (f + 1) * perm.size() / n_folds;
        plan.heldout[k][f].assign(perm.begin() + b, perm.begin() + e);
      }
    } else {
      plan.warnings.push_back("bag '" + bags[k].name + "' has fewer members than folds; using 50/50 splits");
      for (std::size_t f = 0; f < n_folds; ++f) {
        std::vector<std::size_t> perm = members;
        Rng rng = Rng::derive(seed, k, f + 1);
        rng.shuffle(perm);
        std::size_t held = perm.size() / 2;  // at least 1, at most size-1
        plan.heldout[k][f].assign(perm.begin(), perm.begin() + held);
      }
    }
  }
  return plan;
}

double violation_score(const Model& model, const BagSet& heldout_bags,
                       const ConstraintSet& cons, const FeatureMatrix& features,
                       bool include_differences) {
  std::unordered_map<std::size_t, double> p_hat;
  auto bag_p_hat = [&](std::size_t k) {
    auto it = p_hat.find(k);
    if (it != p_hat.end()) return it->second;
    const auto& members = heldout_bags[k].members;
    if (members.empty())
      throw Error("violation_score: empty held-out bag '" + heldout_bags[k].name + "'");
    std::size_t pos = 0;
    for (std::size_t i : members)
      if (features.dot_row(i, model.weights.data()) >= 0.0) ++pos;
    double p = static_cast<double>(pos) / static_cast<double>(members.size());
    p_hat.emplace(k, p);
    return p;
  };

  double total = 0.0;
  std::size_t count = 0;
  for (const auto& b : cons.bounds) {
    double p = bag_p_hat(b.bag);
    total += std::max(p - b.upper, 0.0) + std::max(b.lower - p, 0.0);
    ++count;
  }
  if (include_differences) {
    for (const auto& d : cons.differences) {
      double diff = bag_p_hat(d.upper_bag) - bag_p_hat(d.lower_bag);
      total += std::max(diff - d.upper, 0.0) + std::max(d.lower - diff, 0.0);
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

GridResult select_C(const std::vector<double>& grid, const TunerInputs& in,
                    const CvPlan& plan) {
  if (grid.empty()) throw Error("select_C: empty grid");
  const FeatureMatrix& features = *in.features;
  const BagSet& bags = *in.bags;
  const ConstraintSet& cons = *in.cons;
  const LabeledSet& labeled = *in.labeled;
  const std::size_t n = features.rows() - labeled.size();

  GridResult res;
  res.grid = grid;
  res.cell_scores.assign(grid.size(), {});
  res.mean_violation.assign(grid.size(), 0.0);

  // fold-level structures are independent of C; precompute them
  struct FoldData {
    std::vector<std::size_t> keep;              // training rows, old indices
    FeatureMatrix sub_features;
    BagSet sub_bags;
    BagSet held_bags;
    LabeledSet sub_labeled;
  };
  std::vector<FoldData> folds(plan.n_folds);
  std::unordered_map<std::size_t, int> labeled_lookup;
  for (const auto& [idx, lab] : labeled.entries) labeled_lookup.emplace(idx, lab);

  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    FoldData& fd = folds[f];
    std::unordered_set<std::size_t> held;
    for (std::size_t k = 0; k < bags.size(); ++k)
      for (std::size_t i : plan.heldout[k][f]) held.insert(i);

    std::vector<std::size_t> keep_unlabeled, keep_labeled;
    for (std::size_t i = 0; i < features.rows(); ++i) {
      if (held.count(i)) continue;
      if (i < n)
        keep_unlabeled.push_back(i);
      else
        keep_labeled.push_back(i);
    }
    fd.keep = keep_unlabeled;
    fd.keep.insert(fd.keep.end(), keep_labeled.begin(), keep_labeled.end());
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t s = 0; s < fd.keep.size(); ++s) remap.emplace(fd.keep[s], s);
    fd.sub_features = features.select_rows(fd.keep);
    for (std::size_t s = keep_unlabeled.size(); s < fd.keep.size(); ++s)
      fd.sub_labeled.entries.emplace_back(s, labeled_lookup.at(fd.keep[s]));

    fd.sub_bags.bags.resize(bags.size());
    fd.held_bags.bags.resize(bags.size());
    for (std::size_t k = 0; k < bags.size(); ++k) {
      fd.sub_bags.bags[k].name = bags[k].name;
      fd.held_bags.bags[k].name = bags[k].name;
      std::unordered_set<std::size_t> held_k(plan.heldout[k][f].begin(),
                                             plan.heldout[k][f].end());
      for (std::size_t i : bags[k].members) {
        if (held_k.count(i))
          fd.held_bags.bags[k].members.push_back(i);
        else
          fd.sub_bags.bags[k].members.push_back(remap.at(i));
      }
      if (fd.sub_bags.bags[k].members.empty())
        throw Error("select_C: training sub-bag '" + bags[k].name + "' is empty");
    }
  }

  std::size_t usable = 0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    res.cell_scores[c].assign(plan.n_folds, std::nullopt);
    double total = 0.0;
    std::size_t cells = 0;
    for (std::size_t f = 0; f < plan.n_folds; ++f) {
      Hyperparams hp = in.hp;
      hp.C = grid[c];
      FitOptions fo = in.fit;
      fo.seed = Rng::derive(plan.seed, c + 1, f + 1).next_u64();
      FitResult fit = fit_ballpark(folds[f].sub_features, folds[f].sub_bags, cons,
                                   folds[f].sub_labeled, hp, fo);
      if (fit.trace.status == FitStatus::infeasible) {
        ++res.dropped_cells;
        continue;
      }
      double score =
          violation_score(fit.model, folds[f].held_bags, cons, features);
      res.cell_scores[c][f] = score;
      total += score;
      ++cells;
    }
    if (cells > 0) {
      res.mean_violation[c] = total / static_cast<double>(cells);
      ++usable;
    } else {
      res.mean_violation[c] = std::numeric_limits<double>::infinity();
    }
  }
  if (usable == 0) throw Error("select_C: every (C, fold) run was infeasible");

  // argmin in ascending C order so ties resolve toward the smaller C
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  std::size_t best = order[0];
  for (std::size_t idx : order)
    if (res.mean_violation[idx] < res.mean_violation[best]) best = idx;
  res.selected_index = best;
  res.selected_C = grid[best];
  return res;
}

std::vector<double> default_C_grid() {
  std::vector<double> g;
  for (int e = -4; e <= 4; ++e) g.push_back(std::pow(10.0, e));
  return g;
}

}  // namespace ballpark
