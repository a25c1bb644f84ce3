#pragma once

#include <span>
#include <string>
#include <vector>

#include "ballpark/types.hpp"

namespace ballpark {

enum class LpStepStatus { optimal, infeasible };

struct LabelLpOptions {
  double feas_tol = 1e-8;
  bool soft = false;    // add violation slacks weighted by rho
  double rho = 1.0;
};

struct LabelLpSolution {
  LpStepStatus status = LpStepStatus::optimal;
  LabelVector y;                         // length N; box respected
  double objective = 0.0;                // mean hinge over all N instances
  std::vector<std::string> certificate;  // minimal conflicting constraint subset
  std::vector<std::size_t> p_hat_bags;   // constrained bag ids
  std::vector<double> p_hat;             // their estimated proportions
  double total_violation = 0.0;          // soft mode: sum of violation slacks
};

// Solves the label step for fixed margins m_i = w'phi(x_i) over the N
// unlabeled instances: minimize (1/N) sum_i max(0, 1 - m_i y_i) subject to
// -1 <= y <= 1 and the proportion/difference constraints. Instances outside
// every constrained bag decouple and are set to sign(m_i) (ties +1) in
// closed form; the rest go through an exact LP with the hinge split at its
// breakpoint into at most two bounded segments per instance.
LabelLpSolution solve_label_step(std::span<const double> margins,
                                 const BagSet& bags, const ConstraintSet& cons,
                                 const LabeledSet& labeled,
                                 const LabelLpOptions& opt = {});

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::string> certificate;
};

// Phase-1 on the same polytope, independent of margins.
FeasibilityReport check_feasibility(const BagSet& bags,
                                    const ConstraintSet& cons,
                                    const LabeledSet& labeled,
                                    std::size_t n_unlabeled,
                                    double feas_tol = 1e-8);

// A constraint set whose proportion/difference rows each carry a nonnegative
// violation variable weighted by rho in the LP objective. Solving one is
// always feasible; the materialized slack columns are assembled inside the
// label step.
struct SoftenedProblem {
  ConstraintSet cons;
  double rho = 0.0;
};
SoftenedProblem soften(const ConstraintSet& cons, double rho);

LabelLpSolution solve_label_step(std::span<const double> margins,
                                 const BagSet& bags, const SoftenedProblem& soft,
                                 const LabeledSet& labeled,
                                 double feas_tol = 1e-8);

}  // namespace ballpark
