#include "ballpark/simplex.hpp"

#include <cmath>
#include <stdexcept>

#include "ballpark/kernels.hpp"

namespace ballpark::lp {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;

// Bounded-variable revised simplex with an explicit dense basis inverse.
// Row constraints become equalities via slack variables bounded by the row
// range; infeasible starts are repaired by a phase-1 artificial objective.
// Entering variable: Dantzig pricing, falling back to Bland's rule after a
// stall so cycling cannot occur. Artificial columns never re-enter.
class Simplex {
 public:
  Simplex(const Problem& p, double feas_tol)
      : prob_(p), feas_tol_(feas_tol), m_(p.rows.size()) {
    n_struct_ = p.n_vars;
    n_total_ = n_struct_ + m_;  // + slack per row
    lower_ = p.var_lower;
    upper_ = p.var_upper;
    cost_ = p.cost;
    cost_.resize(n_total_ + m_, 0.0);
    lower_.resize(n_total_ + m_, 0.0);
    upper_.resize(n_total_ + m_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j)
      if (!std::isfinite(lower_[j]))
        throw std::invalid_argument("simplex: variable lower bound must be finite");
    cols_.assign((n_total_ + m_) * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      for (const auto& [j, a] : p.rows[r].coeffs) {
        if (j >= n_struct_) throw std::invalid_argument("simplex: bad row index");
        col(j)[r] += a;
      }
      col(n_struct_ + r)[r] = -1.0;  // slack: a'x - t = 0
      lower_[n_struct_ + r] = p.rows[r].lower;
      upper_[n_struct_ + r] = p.rows[r].upper;
    }
    x_.assign(n_total_ + m_, 0.0);
    at_upper_.assign(n_total_ + m_, false);
    in_basis_.assign(n_total_ + m_, false);
  }

  Solution run() {
    Solution sol;
    setup_basis();
    if (n_artificial_ > 0) {
      phase1_ = true;
      if (!iterate()) return limit_solution();
      double resid = 0.0;
      for (std::size_t j = n_total_; j < n_total_ + n_artificial_; ++j)
        resid += x_[j];
      if (resid > feas_tol_ * std::max(1.0, scale_)) {
        sol.status = Status::infeasible;
        sol.phase1_residual = resid;
        for (std::size_t r = 0; r < m_; ++r) {
          std::size_t b = basis_[r];
          if (b >= n_total_ && x_[b] > feas_tol_ * std::max(1.0, scale_))
            sol.infeasible_rows.push_back(art_row_[b - n_total_]);
        }
        return sol;
      }
      // pin artificials at zero for phase 2
      for (std::size_t j = n_total_; j < n_total_ + n_artificial_; ++j) {
        lower_[j] = 0.0;
        upper_[j] = 0.0;
        if (!in_basis_[j]) x_[j] = 0.0;
      }
    }
    phase1_ = false;
    if (!iterate()) return limit_solution();

    sol.status = Status::optimal;
    sol.x.assign(x_.begin(), x_.begin() + n_struct_);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_struct_; ++j)
      sol.objective += prob_.cost[j] * x_[j];
    return sol;
  }

 private:
  double* col(std::size_t j) { return cols_.data() + j * m_; }

  double ecost(std::size_t j) const {
    if (phase1_) return j >= n_total_ ? 1.0 : 0.0;
    return cost_[j];
  }

  void setup_basis() {
    basis_.assign(m_, 0);
    art_row_.clear();
    n_artificial_ = 0;
    scale_ = 1.0;

    // structural vars start at their finite lower bound
    for (std::size_t j = 0; j < n_struct_; ++j) {
      x_[j] = lower_[j];
      at_upper_[j] = false;
      scale_ = std::max(scale_, std::fabs(x_[j]));
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double act = 0.0;
      for (const auto& [j, a] : prob_.rows[r].coeffs) act += a * x_[j];
      scale_ = std::max(scale_, std::fabs(act));
      double lo = lower_[n_struct_ + r], up = upper_[n_struct_ + r];
      double t = std::min(std::max(act, lo), up);
      x_[n_struct_ + r] = t;
      at_upper_[n_struct_ + r] = std::isfinite(up) && t == up;
      double resid = act - t;
      if (resid != 0.0) {
        std::size_t aj = n_total_ + n_artificial_;
        ++n_artificial_;
        art_row_.push_back(r);
        col(aj)[r] = resid > 0.0 ? -1.0 : 1.0;  // a'x - t + s*art = 0
        lower_[aj] = 0.0;
        upper_[aj] = kInf;
        x_[aj] = std::fabs(resid);
        basis_[r] = aj;
        in_basis_[aj] = true;
      } else {
        basis_[r] = n_struct_ + r;
        in_basis_[n_struct_ + r] = true;
      }
    }
    refactorize();
  }

  // rebuild binv_ from the basis columns by Gauss-Jordan with partial pivoting
  void refactorize() {
    std::vector<double> mat(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      const double* bc = col(basis_[c]);
      for (std::size_t i = 0; i < m_; ++i) mat[i * m_ + c] = bc[i];
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::fabs(mat[c * m_ + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        double v = std::fabs(mat[r * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < kPivotTol) throw std::runtime_error("simplex: singular basis");
      if (piv != c)
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(mat[piv * m_ + k], mat[c * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
        }
      double d = 1.0 / mat[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        mat[c * m_ + k] *= d;
        inv[c * m_ + k] *= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = mat[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          mat[r * m_ + k] -= f * mat[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    recompute_basics();
  }

  // x_B = B^{-1} (0 - A_N x_N)
  void recompute_basics() {
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < n_total_ + n_artificial_; ++j) {
      if (in_basis_[j] || x_[j] == 0.0) continue;
      const double* c = col(j);
      for (std::size_t r = 0; r < m_; ++r)
        if (c[r] != 0.0) rhs[r] -= c[r] * x_[j];
    }
    for (std::size_t r = 0; r < m_; ++r)
      x_[basis_[r]] = kernels::dot(binv_.data() + r * m_, rhs.data(), m_);
  }

  bool iterate() {
    const std::size_t limit = 20000 + 20 * (n_total_ + m_);
    std::size_t stall = 0;
    double last_obj = current_cost();
    std::vector<double> y(m_), bcol(m_);

    for (std::size_t it = 0; it < limit; ++it) {
      // y' = c_B' B^{-1}
      y.assign(m_, 0.0);
      for (std::size_t r = 0; r < m_; ++r) {
        double cb = ecost(basis_[r]);
        if (cb != 0.0) kernels::axpy(cb, binv_.data() + r * m_, y.data(), m_);
      }

      const bool bland = stall >= 40;
      std::size_t enter = SIZE_MAX;
      double best_score = kCostTol;
      int enter_dir = 0;
      for (std::size_t j = 0; j < n_total_; ++j) {  // artificials never enter
        if (in_basis_[j] || lower_[j] == upper_[j]) continue;
        double d = ecost(j) - kernels::dot(y.data(), col(j), m_);
        int dir;
        double score;
        if (!at_upper_[j] && d < -kCostTol) {
          dir = +1;
          score = -d;
        } else if (at_upper_[j] && d > kCostTol) {
          dir = -1;
          score = d;
        } else {
          continue;
        }
        if (bland) {  // smallest eligible index
          enter = j;
          enter_dir = dir;
          break;
        }
        if (score > best_score) {
          best_score = score;
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter == SIZE_MAX) return true;  // optimal for this phase

      const double* a = col(enter);
      for (std::size_t r = 0; r < m_; ++r)
        bcol[r] = kernels::dot(binv_.data() + r * m_, a, m_);

      // ratio test; theta is the move of the entering var along enter_dir
      double theta = kInf;
      std::size_t leave_row = SIZE_MAX;
      bool leave_to_upper = false;
      if (std::isfinite(upper_[enter]))
        theta = upper_[enter] - lower_[enter];  // bound flip
      for (std::size_t r = 0; r < m_; ++r) {
        double rate = -enter_dir * bcol[r];  // d x_B[r] / d theta
        std::size_t bj = basis_[r];
        double t;
        bool to_upper;
        if (rate > kPivotTol) {
          if (!std::isfinite(upper_[bj])) continue;
          t = (upper_[bj] - x_[bj]) / rate;
          to_upper = true;
        } else if (rate < -kPivotTol) {
          t = (x_[bj] - lower_[bj]) / (-rate);
          to_upper = false;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        if (t < theta - 1e-12 ||
            (t <= theta + 1e-12 && leave_row != SIZE_MAX &&
             basis_[r] < basis_[leave_row])) {
          theta = t;
          leave_row = r;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta))
        throw std::runtime_error("simplex: unbounded direction");

      x_[enter] += enter_dir * theta;
      for (std::size_t r = 0; r < m_; ++r)
        x_[basis_[r]] -= enter_dir * theta * bcol[r];

      if (leave_row == SIZE_MAX) {
        at_upper_[enter] = !at_upper_[enter];  // bound flip, basis unchanged
      } else {
        std::size_t leave = basis_[leave_row];
        x_[leave] = leave_to_upper ? upper_[leave] : lower_[leave];
        at_upper_[leave] = leave_to_upper;
        in_basis_[leave] = false;
        in_basis_[enter] = true;
        basis_[leave_row] = enter;
        pivot_binv(leave_row, bcol);
        if (++pivots_since_refactor_ >= 128) {
          pivots_since_refactor_ = 0;
          refactorize();
        }
      }

      double obj = current_cost();
      if (obj < last_obj - 1e-12 * std::max(1.0, std::fabs(last_obj))) {
        stall = 0;
        last_obj = obj;
      } else {
        ++stall;
      }
    }
    return false;
  }

  void pivot_binv(std::size_t prow, const std::vector<double>& bcol) {
    double piv = bcol[prow];
    if (std::fabs(piv) < kPivotTol) {
      refactorize();
      return;
    }
    double inv = 1.0 / piv;
    double* pr = binv_.data() + prow * m_;
    kernels::scale(inv, pr, m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == prow) continue;
      double f = bcol[r];
      if (f == 0.0) continue;
      kernels::axpy(-f, pr, binv_.data() + r * m_, m_);
    }
  }

  double current_cost() const {
    double s = 0.0;
    if (phase1_) {
      for (std::size_t j = n_total_; j < n_total_ + n_artificial_; ++j) s += x_[j];
    } else {
      for (std::size_t j = 0; j < n_struct_; ++j) s += cost_[j] * x_[j];
    }
    return s;
  }

  static Solution limit_solution() {
    Solution s;
    s.status = Status::iteration_limit;
    return s;
  }

  const Problem& prob_;
  double feas_tol_;
  std::size_t m_, n_struct_ = 0, n_total_ = 0, n_artificial_ = 0;
  bool phase1_ = false;
  double scale_ = 1.0;
  std::size_t pivots_since_refactor_ = 0;
  std::vector<double> cols_, cost_, lower_, upper_, x_, binv_;
  std::vector<std::size_t> basis_, art_row_;
  std::vector<bool> at_upper_, in_basis_;
};

}  // namespace

Solution solve(const Problem& p, double feas_tol) {
  Simplex s(p, feas_tol);
  return s.run();
}

}  // namespace ballpark::lp
