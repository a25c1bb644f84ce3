// Test-only brute-force oracle for the label step: enumerates candidate
// vertices of the constrained-label polytope directly from the constraint
// definitions. Independent of the simplex implementation path.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ballpark/types.hpp"

namespace lp_oracle {

struct RangedRow {
  std::vector<double> coeff;  // dense over the constrained variables
  double lower;
  double upper;
};

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;  // mean hinge over all N instances
  std::vector<double> y;   // full length N
};

// Gaussian elimination solve; returns false when singular.
inline bool solve_square(std::vector<std::vector<double>> a,
                         std::vector<double> b, std::vector<double>& out) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (std::fabs(a[piv][c]) < 1e-11) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < k; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  out.resize(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = b[c] / a[c][c];
  return true;
}

// Exact minimizer of (1/N) sum_i max(0, 1 - m_i y_i) over the box plus the
// bag proportion polytope, by enumerating every candidate vertex: each
// constrained variable is fixed at -1, +1 or its hinge breakpoint, except
// for a set of "free" variables pinned by active rows (one equality per
// active row, each at its lower or upper value).
inline OracleResult solve(std::span<const double> margins,
                          const ballpark::BagSet& bags,
                          const ballpark::ConstraintSet& cons,
                          const ballpark::LabeledSet& labeled) {
  using ballpark::estimated_proportion;
  const std::size_t n = margins.size();

  // constrained variable set
  std::vector<std::size_t> vars;
  {
    std::vector<bool> in(n, false);
    auto touch = [&](std::size_t k) {
      for (std::size_t i : bags[k].members)
        if (i < n) in[i] = true;
    };
    for (const auto& b : cons.bounds) touch(b.bag);
    for (const auto& d : cons.differences) {
      touch(d.upper_bag);
      touch(d.lower_bag);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (in[i]) vars.push_back(i);
  }
  const std::size_t nv = vars.size();
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (std::size_t s = 0; s < nv; ++s) slot[vars[s]] = s;

  // rows over the constrained variables, straight from the p-hat definition
  auto fixed_of = [&](std::size_t idx) -> double {
    for (const auto& [i, lab] : labeled.entries)
      if (i == idx) return lab;
    throw ballpark::Error("oracle: unknown labeled index");
  };
  std::vector<RangedRow> rows;
  auto bag_row = [&](std::size_t k, std::vector<double>& coeff, double& fixed_sum,
                     std::size_t& n_unlab) {
    coeff.assign(nv, 0.0);
    fixed_sum = 0.0;
    n_unlab = 0;
    for (std::size_t i : bags[k].members) {
      if (i < n) {
        coeff[slot[i]] += 1.0;
        ++n_unlab;
      } else {
        fixed_sum += fixed_of(i);
      }
    }
  };
  for (const auto& b : cons.bounds) {
    RangedRow row;
    double fixed_sum;
    std::size_t n_unlab;
    bag_row(b.bag, row.coeff, fixed_sum, n_unlab);
    double two_b = 2.0 * static_cast<double>(bags[b.bag].members.size());
    row.lower = two_b * (b.lower - 0.5) - fixed_sum;
    row.upper = two_b * (b.upper - 0.5) - fixed_sum;
    rows.push_back(std::move(row));
  }
  for (const auto& d : cons.differences) {
    std::vector<double> c1, c2;
    double f1, f2;
    std::size_t u1, u2;
    bag_row(d.upper_bag, c1, f1, u1);
    bag_row(d.lower_bag, c2, f2, u2);
    double a1 = 1.0 / (2.0 * static_cast<double>(bags[d.upper_bag].members.size()));
    double a2 = 1.0 / (2.0 * static_cast<double>(bags[d.lower_bag].members.size()));
    RangedRow row;
    row.coeff.assign(nv, 0.0);
    for (std::size_t s = 0; s < nv; ++s) row.coeff[s] = a1 * c1[s] - a2 * c2[s];
    double c0 = a1 * f1 - a2 * f2;
    row.lower = d.lower - c0;
    row.upper = d.upper - c0;
    rows.push_back(std::move(row));
  }
  const std::size_t nr = rows.size();

  auto hinge_total = [&](const std::vector<double>& yv) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      total += std::max(0.0, 1.0 - margins[i] * yv[i]);
    return total / static_cast<double>(n);
  };

  // candidate fixed values per variable
  std::vector<std::vector<double>> candidates(nv);
  for (std::size_t s = 0; s < nv; ++s) {
    candidates[s] = {-1.0, 1.0};
    double m = margins[vars[s]];
    if (std::fabs(m) > 1.0) candidates[s].push_back(1.0 / m);
  }

  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> yfull(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    yfull[i] = ballpark::sign_or_positive(margins[i]);

  const double tol = 1e-7;
  std::vector<double> yv(nv, 0.0);

  auto consider = [&]() {
    for (std::size_t s = 0; s < nv; ++s)
      if (yv[s] < -1.0 - tol || yv[s] > 1.0 + tol) return;
    for (const auto& row : rows) {
      double v = 0.0;
      for (std::size_t s = 0; s < nv; ++s) v += row.coeff[s] * yv[s];
      if (v < row.lower - tol || v > row.upper + tol) return;
    }
    for (std::size_t s = 0; s < nv; ++s)
      yfull[vars[s]] = std::min(1.0, std::max(-1.0, yv[s]));
    double obj = hinge_total(yfull);
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.y = yfull;
    }
  };

  // free-variable subsets (bitmask over <= 6 vars), active-row subsets and
  // their side assignments
  for (std::uint32_t fmask = 0; fmask < (1u << nv); ++fmask) {
    std::vector<std::size_t> free;
    for (std::size_t s = 0; s < nv; ++s)
      if (fmask & (1u << s)) free.push_back(s);
    const std::size_t k = free.size();
    if (k > nr) continue;

    // assignments of the non-free variables to their candidate values
    std::vector<std::size_t> others;
    for (std::size_t s = 0; s < nv; ++s)
      if (!(fmask & (1u << s))) others.push_back(s);
    std::vector<std::size_t> pick(others.size(), 0);
    while (true) {
      for (std::size_t o = 0; o < others.size(); ++o)
        yv[others[o]] = candidates[others[o]][pick[o]];

      if (k == 0) {
        consider();
      } else {
        // choose k active rows and sides
        std::vector<std::size_t> rowsel(k);
        std::vector<bool> used(nr, false);
        std::function<void(std::size_t, std::size_t)> choose_rows =
            [&](std::size_t depth, std::size_t start) {
              if (depth == k) {
                for (std::uint32_t sides = 0; sides < (1u << k); ++sides) {
                  std::vector<std::vector<double>> a(k, std::vector<double>(k));
                  std::vector<double> rhs(k);
                  bool degenerate = false;
                  for (std::size_t r = 0; r < k; ++r) {
                    const auto& row = rows[rowsel[r]];
                    double target = (sides & (1u << r)) ? row.upper : row.lower;
                    if (!std::isfinite(target)) {
                      degenerate = true;
                      break;
                    }
                    for (std::size_t c = 0; c < k; ++c) a[r][c] = row.coeff[free[c]];
                    double shift = 0.0;
                    for (std::size_t o = 0; o < others.size(); ++o)
                      shift += row.coeff[others[o]] * yv[others[o]];
                    rhs[r] = target - shift;
                  }
                  if (degenerate) continue;
                  std::vector<double> sol;
                  if (!solve_square(a, rhs, sol)) continue;
                  for (std::size_t c = 0; c < k; ++c) yv[free[c]] = sol[c];
                  consider();
                }
                return;
              }
              for (std::size_t r = start; r < nr; ++r) {
                rowsel[depth] = r;
                choose_rows(depth + 1, r + 1);
              }
            };
        choose_rows(0, 0);
      }

      // next non-free assignment
      std::size_t o = 0;
      while (o < others.size()) {
        if (++pick[o] < candidates[others[o]].size()) break;
        pick[o] = 0;
        ++o;
      }
      if (o == others.size()) break;
    }
  }
  return best;
}

}  // namespace lp_oracle
