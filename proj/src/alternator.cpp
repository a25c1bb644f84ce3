#include "ballpark/alternator.hpp"

#include <cmath>
#include <limits>

#include "ballpark/init_rank.hpp"
#include "ballpark/kernels.hpp"
#include "ballpark/rng.hpp"

namespace ballpark {

namespace {

std::size_t count_unlabeled(const FeatureMatrix& features,
                            const LabeledSet& labeled) {
  if (labeled.size() > features.rows())
    throw Error("labeled set larger than the feature matrix");
  return features.rows() - labeled.size();
}

}  // namespace

double objective_value(const Model& w, const LabelVector& y,
                       const FeatureMatrix& features, const LabeledSet& labeled,
                       const Hyperparams& hp) {
  const std::size_t n = y.size();
  if (count_unlabeled(features, labeled) != n)
    throw Error("objective_value: label vector length mismatch");
  for (double v : y.values)
    if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
      throw Error("objective_value: y violates the [-1,1] box");

  double obj = 0.5 * kernels::sq_norm(w.weights.data(), w.weights.size());
  if (n > 0 && hp.C > 0.0) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double m = features.dot_row(i, w.weights.data());
      hinge += std::max(0.0, 1.0 - y[i] * m);
    }
    obj += hp.C / static_cast<double>(n) * hinge;
  }
  if (!labeled.empty() && hp.C_L > 0.0) {
    double hinge = 0.0;
    for (const auto& [idx, lab] : labeled.entries) {
      double m = features.dot_row(idx, w.weights.data());
      hinge += std::max(0.0, 1.0 - lab * m);
    }
    obj += hp.C_L / static_cast<double>(labeled.size()) * hinge;
  }
  return obj;
}

FitResult fit_ballpark(const FeatureMatrix& features, const BagSet& bags,
                       const ConstraintSet& cons, const LabeledSet& labeled,
                       const Hyperparams& hp, const FitOptions& opt) {
  const std::size_t n = count_unlabeled(features, labeled);
  const std::size_t n_labeled = labeled.size();
  {
    auto errs = validate(bags, cons, n, n_labeled);
    auto hperrs = check_hyperparams(hp);
    errs.insert(errs.end(), hperrs.begin(), hperrs.end());
    if (!errs.empty()) throw Error("fit_ballpark: invalid inputs: " + errs.front());
    for (const auto& [idx, lab] : labeled.entries) {
      if (idx < n || idx >= n + n_labeled)
        throw Error("fit_ballpark: labeled index outside [N, N+L)");
      if (lab != 1 && lab != -1) throw Error("fit_ballpark: labels must be +-1");
    }
  }

  FitResult res;
  if (!opt.soft) {
    auto rep = check_feasibility(bags, cons, labeled, n, hp.lp_feas_tol);
    if (!rep.feasible) {
      res.trace.status = FitStatus::infeasible;
      res.trace.certificate = std::move(rep.certificate);
      return res;
    }
  }

  // labeled rows as their own matrix for the initializer
  std::vector<std::size_t> labeled_rows;
  std::vector<int> labeled_labels;
  for (const auto& [idx, lab] : labeled.entries) {
    labeled_rows.push_back(idx);
    labeled_labels.push_back(lab);
  }
  FeatureMatrix labeled_features;
  if (!labeled_rows.empty()) labeled_features = features.select_rows(labeled_rows);

  auto orderings = derive_orderings(cons);
  BagMeanSet means = bag_means(features, bags);
  Model w = solve_init(means, orderings,
                       labeled_rows.empty() ? nullptr : &labeled_features,
                       labeled_labels, hp.C_L, std::min(hp.svm_tol, 1e-6),
                       Rng::derive(opt.seed, 0x1717).next_u64());
  w.has_bias = features.has_bias();
  w.bias_index = features.bias_index();

  const bool exact = hp.descent_mode == DescentMode::exact;
  LabelLpOptions lp_opt;
  lp_opt.feas_tol = hp.lp_feas_tol;
  lp_opt.soft = opt.soft;
  lp_opt.rho = opt.rho;

  res.trace.status = FitStatus::max_iters;
  LabelVector y_prev;
  std::vector<double> margins(n);
  bool have_prev_obj = false;
  double prev_obj_after_w = 0.0;

  for (int t = 1; t <= hp.max_outer_iters; ++t) {
    for (std::size_t i = 0; i < n; ++i)
      margins[i] = features.dot_row(i, w.weights.data());

    LabelLpSolution lab = solve_label_step(margins, bags, cons, labeled, lp_opt);
    if (lab.status == LpStepStatus::infeasible) {
      res.trace.status = FitStatus::infeasible;
      res.trace.certificate = std::move(lab.certificate);
      return res;
    }
    LabelVector y = std::move(lab.y);
    if (exact && have_prev_obj) {
      // exact LP cannot worsen the objective; guard against simplex noise
      double after = objective_value(w, y, features, labeled, hp);
      if (after > prev_obj_after_w && !y_prev.values.empty()) y = y_prev;
    }

    IterationRecord rec;
    rec.lp_status = lab.status;
    rec.lp_total_violation = lab.total_violation;
    rec.p_hat = lab.p_hat;
    if (res.trace.p_hat_bags.empty()) res.trace.p_hat_bags = lab.p_hat_bags;
    rec.objective_after_y = objective_value(w, y, features, labeled, hp);
    std::size_t sat = 0;
    for (double v : y.values)
      if (std::fabs(v) > 0.99) ++sat;
    rec.frac_saturated = n > 0 ? static_cast<double>(sat) / n : 0.0;

    // w-step
    Model w_new;
    const bool any_cost = (hp.C > 0.0 && n > 0) || (hp.C_L > 0.0 && n_labeled > 0);
    if (!any_cost) {
      w_new.weights.assign(features.cols(), 0.0);
    } else {
      SvmProblem sp;
      sp.features = &features;
      sp.labels.resize(features.rows());
      sp.costs.resize(features.rows());
      const double cu = n > 0 ? hp.C / static_cast<double>(n) : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sp.labels[i] = exact ? y[i] : static_cast<double>(sign_or_positive(y[i]));
        sp.costs[i] = cu;
      }
      const double cl =
          n_labeled > 0 ? hp.C_L / static_cast<double>(n_labeled) : 0.0;
      for (const auto& [idx, labv] : labeled.entries) {
        sp.labels[idx] = static_cast<double>(labv);
        sp.costs[idx] = cl;
      }
      w_new = train_svm(sp, hp.svm_tol, 2000,
                        Rng::derive(opt.seed, static_cast<std::uint64_t>(t))
                            .next_u64())
                  .model;
    }
    w_new.has_bias = features.has_bias();
    w_new.bias_index = features.bias_index();

    if (exact) {
      // keep the better of {w_new, w} so the half-step never ascends
      double obj_new = objective_value(w_new, y, features, labeled, hp);
      if (obj_new > rec.objective_after_y) w_new = w;
    }

    // stopping rule: ||w_t - w_{t-1}||^2 / ||w_{t-1}||^2
    double denom = kernels::sq_norm(w.weights.data(), w.weights.size());
    std::vector<double> diff = w_new.weights;
    kernels::axpy(-1.0, w.weights.data(), diff.data(), diff.size());
    double num = kernels::sq_norm(diff.data(), diff.size());
    bool converged;
    if (denom == 0.0) {
      converged = num == 0.0;
      rec.rel_weight_change = num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      rec.rel_weight_change = num / denom;
      converged = rec.rel_weight_change <= hp.rel_tol;
    }

    w = std::move(w_new);
    rec.objective_after_w = objective_value(w, y, features, labeled, hp);
    prev_obj_after_w = rec.objective_after_w;
    have_prev_obj = true;
    y_prev = y;
    res.y = std::move(y);
    res.trace.iterations.push_back(std::move(rec));

    if (converged) {
      res.trace.status = FitStatus::converged;
      break;
    }
  }

  res.model = std::move(w);
  return res;
}

}  // namespace ballpark
