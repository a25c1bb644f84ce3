#include "ballpark/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ballpark/kernels.hpp"
#include "ballpark/rng.hpp"

namespace ballpark {

namespace {

double primal_value(const SvmProblem& p, const std::vector<double>& w) {
  const FeatureMatrix& f = *p.features;
  double obj = 0.5 * kernels::sq_norm(w.data(), w.size());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    if (p.costs[i] == 0.0) continue;
    double m = p.labels[i] * f.dot_row(i, w.data());
    if (m < 1.0) obj += p.costs[i] * (1.0 - m);
  }
  return obj;
}

double dual_value(const std::vector<double>& w, const std::vector<double>& alpha) {
  // e'alpha - 1/2 ||w(alpha)||^2
  double s = kernels::sum(alpha.data(), alpha.size());
  return s - 0.5 * kernels::sq_norm(w.data(), w.size());
}

}  // namespace

SvmResult train_svm(const SvmProblem& p, double tol, int max_passes,
                    std::uint64_t seed) {
  const FeatureMatrix& f = *p.features;
  const std::size_t l = f.rows();
  if (p.labels.size() != l || p.costs.size() != l)
    throw Error("train_svm: label/cost length mismatch");
  bool any_cost = false;
  for (double c : p.costs) {
    if (!std::isfinite(c) || c < 0.0) throw Error("train_svm: invalid cost");
    if (c > 0.0) any_cost = true;
  }
  if (!any_cost) throw Error("train_svm: all costs are zero");

  std::vector<double> w(f.cols(), 0.0);
  std::vector<double> alpha(l, 0.0);
  std::vector<double> qd(l);
  std::vector<std::size_t> index;
  index.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    qd[i] = p.labels[i] * p.labels[i] * f.row_sq_norm(i);
    if (p.costs[i] > 0.0) index.push_back(i);
  }

  Rng rng(seed);
  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf, pg_min_old = -inf;
  std::size_t active = index.size();
  const std::size_t full = active;
  double pg_stop = tol;  // tightened if the gap check is not yet met
  SvmResult res;

  int epoch = 0;
  bool converged = false;
  while (epoch < max_passes && !converged) {
    double pg_max = -inf, pg_min = inf;
    for (std::size_t s = 0; s < active; ++s) {
      std::size_t j = s + rng.next_below(active - s);
      std::swap(index[s], index[j]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      std::size_t i = index[s];
      const double yi = p.labels[i];
      const double ci = p.costs[i];
      double g = yi * f.dot_row(i, w.data()) - 1.0;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {  // shrink
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == ci) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::fabs(pg) > 1e-12) {
        double old = alpha[i];
        if (qd[i] > 0.0)
          alpha[i] = std::min(std::max(old - g / qd[i], 0.0), ci);
        else
          alpha[i] = g < 0.0 ? ci : 0.0;  // zero row: no effect on w
        double d = (alpha[i] - old) * yi;
        if (d != 0.0 && qd[i] > 0.0) f.axpy_row(i, d, w.data());
      }
    }
    ++epoch;

    if (pg_max - pg_min <= pg_stop && pg_max <= pg_stop && -pg_min <= pg_stop) {
      if (active < full) {  // unshrink and confirm on the full set
        active = full;
        pg_max_old = inf;
        pg_min_old = -inf;
        continue;
      }
      double pv = primal_value(p, w);
      double dv = dual_value(w, alpha);
      double gap = (pv - dv) / std::max(std::fabs(pv), 1e-12);
      if (gap <= tol) {
        converged = true;
        continue;
      }
      pg_stop *= 0.25;  // gap not met; keep iterating with a tighter PG stop
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }

    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
  }

  res.primal = primal_value(p, w);
  res.dual = dual_value(w, alpha);
  res.rel_gap = (res.primal - res.dual) / std::max(std::fabs(res.primal), 1e-12);
  res.model.weights = std::move(w);
  res.model.has_bias = f.has_bias();
  res.model.bias_index = f.bias_index();
  res.alpha = std::move(alpha);
  res.epochs = epoch;
  return res;
}

std::vector<double> decision_values(const Model& m, const FeatureMatrix& f) {
  if (f.cols() != m.weights.size())
    throw Error("decision_values: dimension mismatch");
  std::vector<double> out(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i)
    out[i] = f.dot_row(i, m.weights.data());
  return out;
}

std::vector<int> predict_labels(const Model& m, const FeatureMatrix& f) {
  auto margins = decision_values(m, f);
  std::vector<int> out(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i)
    out[i] = sign_or_positive(margins[i]);
  return out;
}

std::vector<double> class_weighted_costs(std::span<const int> labels,
                                         double base_cost) {
  std::size_t pos = 0, neg = 0;
  for (int y : labels) {
    if (y == 1)
      ++pos;
    else if (y == -1)
      ++neg;
    else
      throw Error("class_weighted_costs: labels must be +-1");
  }
  if (pos == 0 || neg == 0)
    throw Error("class_weighted_costs: both classes must be present");
  const double n = static_cast<double>(labels.size());
  std::vector<double> costs(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double n_class = labels[i] == 1 ? static_cast<double>(pos)
                                    : static_cast<double>(neg);
    costs[i] = base_cost * n / (2.0 * n_class);
  }
  return costs;
}

double svm_primal_objective(const SvmProblem& p, const Model& m) {
  return primal_value(p, m.weights);
}

}  // namespace ballpark
