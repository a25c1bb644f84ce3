#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ballpark/label_lp.hpp"
#include "ballpark/svm.hpp"
#include "ballpark/types.hpp"

namespace ballpark {

enum class FitStatus { converged, max_iters, infeasible };

struct IterationRecord {
  double objective_after_y = 0.0;  // objective with w^{t-1}, y^t
  double objective_after_w = 0.0;  // with w^t, y^t
  double rel_weight_change = 0.0;
  std::vector<double> p_hat;       // per constrained bag
  LpStepStatus lp_status = LpStepStatus::optimal;
  double frac_saturated = 0.0;     // fraction of |y_i| > 0.99
  double lp_total_violation = 0.0; // soft mode only
};

struct TrainTrace {
  std::vector<std::size_t> p_hat_bags;
  std::vector<IterationRecord> iterations;
  FitStatus status = FitStatus::max_iters;
  std::vector<std::string> certificate;
};

struct FitResult {
  Model model;
  LabelVector y;
  TrainTrace trace;
};

struct FitOptions {
  std::uint64_t seed = 1;
  bool soft = false;  // soften proportion constraints with weight rho
  double rho = 1.0;
};

// The bi-convex training objective:
//   1/2 w'w + (C/N) sum_unlabeled hinge(y_i m_i) + (C_L/L) sum_labeled hinge
double objective_value(const Model& w, const LabelVector& y,
                       const FeatureMatrix& features, const LabeledSet& labeled,
                       const Hyperparams& hp);

// Alternating optimization: w0 from the bag-mean ranking program, then
// repeat (label LP, SVM refit) until the relative squared weight change
// drops below hp.rel_tol or hp.max_outer_iters is reached. In sign mode the
// SVM sees Sign(y); exact mode feeds the continuous y and keeps whichever
// of {new w, previous w} has the lower objective so the descent guarantee
// survives solver tolerances.
FitResult fit_ballpark(const FeatureMatrix& features, const BagSet& bags,
                       const ConstraintSet& cons, const LabeledSet& labeled,
                       const Hyperparams& hp, const FitOptions& opt = {});

}  // namespace ballpark
