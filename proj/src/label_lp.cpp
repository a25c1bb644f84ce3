#include "ballpark/label_lp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "ballpark/simplex.hpp"

namespace ballpark {

namespace {

struct BagView {
  std::vector<std::size_t> unlabeled;  // member indices < N
  double fixed_sum = 0.0;              // sum of fixed labels of labeled members
  std::size_t size = 0;                // |B_k| including labeled members
};

BagView make_view(const Bag& bag, std::size_t n_unlabeled,
                  const std::unordered_map<std::size_t, int>& fixed) {
  BagView v;
  v.size = bag.members.size();
  for (std::size_t i : bag.members) {
    if (i < n_unlabeled) {
      v.unlabeled.push_back(i);
    } else {
      auto it = fixed.find(i);
      if (it == fixed.end())
        throw Error("bag member " + std::to_string(i) +
                    " is neither unlabeled nor in the labeled set");
      v.fixed_sum += it->second;
    }
  }
  return v;
}

std::string describe_bound(const BagSet& bags, const BoundConstraint& b) {
  return "bound on bag '" + bags[b.bag].name + "': " + std::to_string(b.lower) +
         " <= p <= " + std::to_string(b.upper);
}

std::string describe_diff(const BagSet& bags, const DifferenceConstraint& d) {
  return "difference '" + bags[d.upper_bag].name + "' - '" +
         bags[d.lower_bag].name + "' in [" + std::to_string(d.lower) + ", " +
         std::to_string(d.upper) + "]";
}

// One hinge max(0, 1 - m*y) over y in [-1,1], written as y = -1 + sum of
// segment variables with nondecreasing slopes (exact for convex objectives).
struct HingePieces {
  double constant;             // hinge value at y = -1
  double len[2];
  double slope[2];
  int count;
};

HingePieces split_hinge(double m) {
  HingePieces h{};
  h.constant = std::max(0.0, 1.0 + m);
  if (std::fabs(m) <= 1.0) {
    h.count = 1;
    h.len[0] = 2.0;
    h.slope[0] = -m;  // hinge active across the whole box
    return h;
  }
  double b = 1.0 / m;  // breakpoint inside (-1, 1)
  h.count = 2;
  if (m > 1.0) {
    h.len[0] = 1.0 + b;
    h.slope[0] = -m;
    h.len[1] = 1.0 - b;
    h.slope[1] = 0.0;
  } else {  // m < -1: flat then rising
    h.len[0] = 1.0 + b;
    h.slope[0] = 0.0;
    h.len[1] = 1.0 - b;
    h.slope[1] = -m;
  }
  return h;
}

struct Assembly {
  lp::Problem prob;
  std::vector<std::size_t> instances;              // constrained instances, ascending
  std::vector<std::array<std::size_t, 2>> vars;    // piece vars per instance
  std::vector<int> var_count;
  double constant = 0.0;                           // objective constant (already /N)
  std::vector<std::string> row_names;              // per emitted LP row
  std::vector<std::string> constant_conflicts;     // violated constant-only constraints
  double constant_violation = 0.0;                 // their total deviation
  std::vector<std::size_t> soft_vars;              // violation variables
};

// Masks select which bound/difference constraints participate (used by the
// infeasibility deletion filter).
Assembly assemble(std::span<const double> margins, const BagSet& bags,
                  const ConstraintSet& cons, const LabeledSet& labeled,
                  std::size_t n_unlabeled, bool with_objective, bool soft,
                  double rho, double feas_tol,
                  const std::vector<bool>* bound_mask = nullptr,
                  const std::vector<bool>* diff_mask = nullptr) {
  Assembly as;
  std::unordered_map<std::size_t, int> fixed;
  for (const auto& [idx, lab] : labeled.entries) fixed.emplace(idx, lab);

  // constrained bags = bags appearing in any active bound or difference
  std::unordered_set<std::size_t> cbags;
  for (std::size_t c = 0; c < cons.bounds.size(); ++c) {
    if (bound_mask && !(*bound_mask)[c]) continue;
    cbags.insert(cons.bounds[c].bag);
  }
  for (std::size_t c = 0; c < cons.differences.size(); ++c) {
    if (diff_mask && !(*diff_mask)[c]) continue;
    cbags.insert(cons.differences[c].upper_bag);
    cbags.insert(cons.differences[c].lower_bag);
  }

  std::unordered_map<std::size_t, BagView> views;
  for (std::size_t k : cbags)
    views.emplace(k, make_view(bags[k], n_unlabeled, fixed));

  std::unordered_set<std::size_t> member_set;
  for (const auto& [k, v] : views)
    member_set.insert(v.unlabeled.begin(), v.unlabeled.end());
  as.instances.assign(member_set.begin(), member_set.end());
  std::sort(as.instances.begin(), as.instances.end());

  std::unordered_map<std::size_t, std::size_t> pos;  // instance -> slot
  for (std::size_t s = 0; s < as.instances.size(); ++s)
    pos.emplace(as.instances[s], s);

  as.vars.resize(as.instances.size());
  as.var_count.resize(as.instances.size());
  const double inv_n = n_unlabeled > 0 ? 1.0 / static_cast<double>(n_unlabeled) : 0.0;

  for (std::size_t s = 0; s < as.instances.size(); ++s) {
    if (with_objective) {
      HingePieces h = split_hinge(margins[as.instances[s]]);
      as.constant += h.constant * inv_n;
      as.var_count[s] = h.count;
      for (int q = 0; q < h.count; ++q)
        as.vars[s][q] = as.prob.add_var(0.0, h.len[q], h.slope[q] * inv_n);
    } else {
      as.var_count[s] = 1;
      as.vars[s][0] = as.prob.add_var(0.0, 2.0, 0.0);
    }
  }

  // In soft mode every ranged row splits into two one-sided rows, each with
  // its own violation variable, so even lower > upper stays satisfiable.
  // `unit` converts one proportion unit of violation into row units (bound
  // rows live in the sum-of-labels scale, difference rows in p-hat scale).
  auto push_row = [&](lp::Problem::Row&& row, const std::string& name,
                      double unit) {
    if (!soft) {
      if (row.lower > row.upper + feas_tol) {
        as.constant_conflicts.push_back(name + " (empty interval)");
        return;
      }
      as.prob.rows.push_back(std::move(row));
      as.row_names.push_back(name);
      return;
    }
    lp::Problem::Row ge;  // a'y + unit*v >= lower
    ge.coeffs = row.coeffs;
    std::size_t vm = as.prob.add_var(0.0, lp::kInf, rho);
    ge.coeffs.emplace_back(vm, unit);
    ge.lower = row.lower;
    ge.upper = lp::kInf;
    as.soft_vars.push_back(vm);
    as.prob.rows.push_back(std::move(ge));
    as.row_names.push_back(name + " (lower)");

    lp::Problem::Row le;  // -a'y + unit*v >= -upper
    le.coeffs = std::move(row.coeffs);
    for (auto& [j, a] : le.coeffs) a = -a;
    std::size_t vp = as.prob.add_var(0.0, lp::kInf, rho);
    le.coeffs.emplace_back(vp, unit);
    le.lower = -row.upper;
    le.upper = lp::kInf;
    as.soft_vars.push_back(vp);
    as.prob.rows.push_back(std::move(le));
    as.row_names.push_back(name + " (upper)");
  };

  for (std::size_t c = 0; c < cons.bounds.size(); ++c) {
    if (bound_mask && !(*bound_mask)[c]) continue;
    const auto& b = cons.bounds[c];
    const BagView& v = views.at(b.bag);
    const double two_b = 2.0 * static_cast<double>(v.size);
    // l <= p_hat <= u  <=>  two_b(l - 1/2) - F + U <= sum(pieces) <= ...
    const double shift = static_cast<double>(v.unlabeled.size()) - v.fixed_sum;
    double lo = two_b * (b.lower - 0.5) + shift;
    double up = two_b * (b.upper - 0.5) + shift;
    if (v.unlabeled.empty()) {
      double p = v.fixed_sum / two_b + 0.5;
      if (p < b.lower - feas_tol || p > b.upper + feas_tol) {
        as.constant_conflicts.push_back(describe_bound(bags, b));
        as.constant_violation += std::max(b.lower - p, 0.0) + std::max(p - b.upper, 0.0);
      }
      continue;
    }
    lp::Problem::Row row;
    for (std::size_t i : v.unlabeled) {
      std::size_t s = pos.at(i);
      for (int q = 0; q < as.var_count[s]; ++q)
        row.coeffs.emplace_back(as.vars[s][q], 1.0);
    }
    row.lower = lo;
    row.upper = up;
    push_row(std::move(row), describe_bound(bags, b), two_b);
  }

  for (std::size_t c = 0; c < cons.differences.size(); ++c) {
    if (diff_mask && !(*diff_mask)[c]) continue;
    const auto& d = cons.differences[c];
    const BagView& v1 = views.at(d.upper_bag);
    const BagView& v2 = views.at(d.lower_bag);
    const double a1 = 1.0 / (2.0 * static_cast<double>(v1.size));
    const double a2 = 1.0 / (2.0 * static_cast<double>(v2.size));
    // p1 - p2 = a1*(sum pieces_1 - U1 + F1) - a2*(...)  (the 1/2's cancel)
    double c0 = a1 * (v1.fixed_sum - static_cast<double>(v1.unlabeled.size())) -
                a2 * (v2.fixed_sum - static_cast<double>(v2.unlabeled.size()));
    if (v1.unlabeled.empty() && v2.unlabeled.empty()) {
      if (c0 < d.lower - feas_tol || c0 > d.upper + feas_tol) {
        as.constant_conflicts.push_back(describe_diff(bags, d));
        as.constant_violation += std::max(d.lower - c0, 0.0) + std::max(c0 - d.upper, 0.0);
      }
      continue;
    }
    std::unordered_map<std::size_t, double> coeff;
    for (std::size_t i : v1.unlabeled) coeff[i] += a1;
    for (std::size_t i : v2.unlabeled) coeff[i] -= a2;
    lp::Problem::Row row;
    for (std::size_t i : v1.unlabeled) {
      auto it = coeff.find(i);
      if (it == coeff.end()) continue;
      std::size_t s = pos.at(i);
      for (int q = 0; q < as.var_count[s]; ++q)
        row.coeffs.emplace_back(as.vars[s][q], it->second);
      coeff.erase(it);
    }
    for (std::size_t i : v2.unlabeled) {
      auto it = coeff.find(i);
      if (it == coeff.end()) continue;
      std::size_t s = pos.at(i);
      for (int q = 0; q < as.var_count[s]; ++q)
        row.coeffs.emplace_back(as.vars[s][q], it->second);
      coeff.erase(it);
    }
    row.lower = d.lower - c0;
    row.upper = d.upper - c0;
    push_row(std::move(row), describe_diff(bags, d), 1.0);
  }

  return as;
}

// deletion filter: shrink the active constraint set to an irreducible
// infeasible core
std::vector<std::string> find_certificate(const BagSet& bags,
                                          const ConstraintSet& cons,
                                          const LabeledSet& labeled,
                                          std::size_t n_unlabeled,
                                          double feas_tol) {
  std::vector<bool> bmask(cons.bounds.size(), true);
  std::vector<bool> dmask(cons.differences.size(), true);

  auto feasible = [&]() {
    Assembly as = assemble({}, bags, cons, labeled, n_unlabeled,
                           /*with_objective=*/false, /*soft=*/false, 0.0,
                           feas_tol, &bmask, &dmask);
    if (!as.constant_conflicts.empty()) return false;
    lp::Solution sol = lp::solve(as.prob, feas_tol);
    return sol.status == lp::Status::optimal;
  };

  for (std::size_t c = 0; c < cons.bounds.size(); ++c) {
    bmask[c] = false;
    if (feasible()) bmask[c] = true;  // needed for infeasibility, keep
  }
  for (std::size_t c = 0; c < cons.differences.size(); ++c) {
    dmask[c] = false;
    if (feasible()) dmask[c] = true;
  }

  std::vector<std::string> cert;
  for (std::size_t c = 0; c < cons.bounds.size(); ++c)
    if (bmask[c]) cert.push_back(describe_bound(bags, cons.bounds[c]));
  for (std::size_t c = 0; c < cons.differences.size(); ++c)
    if (dmask[c]) cert.push_back(describe_diff(bags, cons.differences[c]));
  if (cert.empty()) cert.push_back("constraint set is infeasible");
  return cert;
}

}  // namespace

LabelLpSolution solve_label_step(std::span<const double> margins,
                                 const BagSet& bags, const ConstraintSet& cons,
                                 const LabeledSet& labeled,
                                 const LabelLpOptions& opt) {
  const std::size_t n = margins.size();
  LabelLpSolution out;
  out.y.values.assign(n, 0.0);

  Assembly as = assemble(margins, bags, cons, labeled, n,
                         /*with_objective=*/true, opt.soft, opt.rho,
                         opt.feas_tol);

  if (!as.constant_conflicts.empty() && !opt.soft) {
    out.status = LpStepStatus::infeasible;
    out.certificate = find_certificate(bags, cons, labeled, n, opt.feas_tol);
    return out;
  }

  // closed form for instances outside every constrained bag; their optimal
  // hinge is max(0, 1 - |m_i|)
  std::unordered_set<std::size_t> constrained(as.instances.begin(),
                                              as.instances.end());
  double closed_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (constrained.count(i)) continue;
    out.y.values[i] = sign_or_positive(margins[i]);
    closed_loss += std::max(0.0, 1.0 - std::fabs(margins[i]));
  }

  if (as.instances.empty()) {
    out.objective = n > 0 ? closed_loss / static_cast<double>(n) : 0.0;
    out.total_violation = as.constant_violation;
    return out;
  }

  lp::Solution sol = lp::solve(as.prob, opt.feas_tol);
  if (sol.status == lp::Status::infeasible) {
    out.status = LpStepStatus::infeasible;
    out.certificate = find_certificate(bags, cons, labeled, n, opt.feas_tol);
    return out;
  }
  if (sol.status != lp::Status::optimal)
    throw Error("label step: simplex iteration limit reached");

  for (std::size_t s = 0; s < as.instances.size(); ++s) {
    double y = -1.0;
    for (int q = 0; q < as.var_count[s]; ++q) y += sol.x[as.vars[s][q]];
    out.y.values[as.instances[s]] = std::clamp(y, -1.0, 1.0);
  }

  // objective: recompute the hinge directly from y (exact, includes the
  // closed-form coordinates)
  double hinge = closed_loss;
  for (std::size_t s = 0; s < as.instances.size(); ++s) {
    std::size_t i = as.instances[s];
    hinge += std::max(0.0, 1.0 - margins[i] * out.y.values[i]);
  }
  out.objective = n > 0 ? hinge / static_cast<double>(n) : 0.0;

  for (std::size_t v : as.soft_vars) out.total_violation += sol.x[v];
  out.total_violation += as.constant_violation;

  // p_hat per constrained bag, from the final y
  std::unordered_set<std::size_t> cbags;
  for (const auto& b : cons.bounds) cbags.insert(b.bag);
  for (const auto& d : cons.differences) {
    cbags.insert(d.upper_bag);
    cbags.insert(d.lower_bag);
  }
  std::vector<std::size_t> sorted(cbags.begin(), cbags.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k : sorted) {
    out.p_hat_bags.push_back(k);
    out.p_hat.push_back(estimated_proportion(out.y, labeled, bags[k]));
  }
  return out;
}

FeasibilityReport check_feasibility(const BagSet& bags,
                                    const ConstraintSet& cons,
                                    const LabeledSet& labeled,
                                    std::size_t n_unlabeled, double feas_tol) {
  Assembly as = assemble({}, bags, cons, labeled, n_unlabeled,
                         /*with_objective=*/false, /*soft=*/false, 0.0,
                         feas_tol);
  FeasibilityReport rep;
  if (!as.constant_conflicts.empty()) {
    rep.feasible = false;
    rep.certificate = find_certificate(bags, cons, labeled, n_unlabeled, feas_tol);
    return rep;
  }
  lp::Solution sol = lp::solve(as.prob, feas_tol);
  if (sol.status == lp::Status::optimal) return rep;
  if (sol.status == lp::Status::iteration_limit)
    throw Error("check_feasibility: simplex iteration limit reached");
  rep.feasible = false;
  rep.certificate = find_certificate(bags, cons, labeled, n_unlabeled, feas_tol);
  return rep;
}

SoftenedProblem soften(const ConstraintSet& cons, double rho) {
  if (!(rho > 0.0)) throw Error("soften: rho must be positive");
  return SoftenedProblem{cons, rho};
}

LabelLpSolution solve_label_step(std::span<const double> margins,
                                 const BagSet& bags, const SoftenedProblem& soft,
                                 const LabeledSet& labeled, double feas_tol) {
  LabelLpOptions opt;
  opt.feas_tol = feas_tol;
  opt.soft = true;
  opt.rho = soft.rho;
  return solve_label_step(margins, bags, soft.cons, labeled, opt);
}

}  // namespace ballpark
