#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ballpark/types.hpp"

namespace ballpark {

// L2-regularized L1-hinge problem with per-instance costs:
//   min_w 1/2 w'w + sum_i c_i * max(0, 1 - y_i w'x_i)
// y_i is allowed to be any real (the alternation's exact mode feeds the
// continuous relaxed labels); classification problems use +-1.
struct SvmProblem {
  const FeatureMatrix* features = nullptr;
  std::vector<double> labels;
  std::vector<double> costs;
};

struct Model {
  std::vector<double> weights;
  bool has_bias = false;
  std::size_t bias_index = 0;

  double margin(const FeatureMatrix& f, std::size_t row) const {
    return f.dot_row(row, weights.data());
  }
};

struct SvmResult {
  Model model;
  std::vector<double> alpha;  // dual variables, one per row
  double primal = 0.0;
  double dual = 0.0;
  double rel_gap = 0.0;
  int epochs = 0;
};

// Dual coordinate descent over alpha_i in [0, c_i], random permutation per
// epoch (seeded), projected-gradient shrinking; terminates when the relative
// duality gap is <= tol or after max_passes epochs.
SvmResult train_svm(const SvmProblem& p, double tol = 1e-4,
                    int max_passes = 2000, std::uint64_t seed = 1);

std::vector<double> decision_values(const Model& m, const FeatureMatrix& f);

// sign with ties to +1
std::vector<int> predict_labels(const Model& m, const FeatureMatrix& f);

// c_i = base_cost * n_total / (2 * n_class(i)); errors if a class is absent
std::vector<double> class_weighted_costs(std::span<const int> labels,
                                         double base_cost);

// primal objective of an arbitrary w on a problem (test/diagnostic helper)
double svm_primal_objective(const SvmProblem& p, const Model& m);

}  // namespace ballpark
