#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace ballpark::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize cost'x  subject to  row.lower <= a_r'x <= row.upper  and
// var_lower <= x <= var_upper. Variable lower bounds must be finite; row
// bounds and variable upper bounds may be +-inf.
struct Problem {
  std::size_t n_vars = 0;
  std::vector<double> cost;
  std::vector<double> var_lower;
  std::vector<double> var_upper;
  struct Row {
    std::vector<std::pair<std::size_t, double>> coeffs;  // (var, coefficient)
    double lower = -kInf;
    double upper = kInf;
  };
  std::vector<Row> rows;

  std::size_t add_var(double lo, double up, double c) {
    var_lower.push_back(lo);
    var_upper.push_back(up);
    cost.push_back(c);
    return n_vars++;
  }
};

enum class Status { optimal, infeasible, iteration_limit };

struct Solution {
  Status status = Status::iteration_limit;
  std::vector<double> x;
  double objective = 0.0;
  double phase1_residual = 0.0;        // > 0 when infeasible
  std::vector<std::size_t> infeasible_rows;  // rows whose artificial stayed positive
};

// Two-phase primal simplex on the bounded-variable form, dense tableau
// columns, Bland's rule engaged to break ties/stalls (anti-cycling).
Solution solve(const Problem& p, double feas_tol = 1e-9);

}  // namespace ballpark::lp
