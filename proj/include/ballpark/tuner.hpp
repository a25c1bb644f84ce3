#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ballpark/alternator.hpp"
#include "ballpark/types.hpp"

namespace ballpark {

// Per-bag fold partitions: plan.heldout[k][f] lists the members of bag k
// held out in fold f; the remaining members form the training sub-bag.
struct CvPlan {
  std::size_t n_folds = 10;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::vector<std::size_t>>> heldout;  // [bag][fold]
  std::vector<std::string> warnings;
};

CvPlan split_bags(const BagSet& bags, std::size_t n_folds, std::uint64_t seed);

// Mean over bounded bags of max(p_hat - u, 0) + max(l - p_hat, 0), where
// p_hat is the fraction of the held-out members the model predicts positive.
// Difference-bound deviations are added only when include_differences is set
// (off by default).
double violation_score(const Model& model, const BagSet& heldout_bags,
                       const ConstraintSet& cons, const FeatureMatrix& features,
                       bool include_differences = false);

struct GridResult {
  std::vector<double> grid;
  std::vector<std::vector<std::optional<double>>> cell_scores;  // [C][fold]
  std::vector<double> mean_violation;                           // per C
  std::size_t selected_index = 0;
  double selected_C = 0.0;
  std::size_t dropped_cells = 0;  // infeasible training subproblems
};

struct TunerInputs {
  const FeatureMatrix* features = nullptr;
  const BagSet* bags = nullptr;
  const ConstraintSet* cons = nullptr;
  const LabeledSet* labeled = nullptr;
  Hyperparams hp;
  FitOptions fit;
};

// "Optimizing C": K-fold split of each bag; per (C, fold) train on the
// training sub-bags and score constraint violation on the held-out sub-bags;
// pick the C with the lowest mean violation (ties to the smaller C).
GridResult select_C(const std::vector<double>& grid, const TunerInputs& in,
                    const CvPlan& plan);

// powers of ten from 1e-4 to 1e4
std::vector<double> default_C_grid();

}  // namespace ballpark
