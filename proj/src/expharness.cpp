#include "ballpark/expharness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "ballpark/rng.hpp"

namespace ballpark {

double accuracy(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) throw Error("accuracy: length mismatch");
  if (preds.empty()) throw Error("accuracy: empty input");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == labels[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(preds.size());
}

double macro_f1(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) throw Error("macro_f1: length mismatch");
  if (preds.empty()) throw Error("macro_f1: empty input");
  double f1_sum = 0.0;
  for (int cls : {+1, -1}) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      bool p = preds[i] == cls, t = labels[i] == cls;
      if (p && t) ++tp;
      else if (p && !t) ++fp;
      else if (!p && t) ++fn;
    }
    double denom = 2.0 * tp + fp + fn;
    f1_sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;  // undefined class -> 0
  }
  return f1_sum / 2.0;
}

HighVsLowResult high_vs_low(const FeatureMatrix& features, const BagSet& bags,
                            std::span<const std::size_t> high_bags,
                            std::span<const std::size_t> low_bags,
                            const std::vector<double>& c_grid,
                            std::size_t n_folds, std::uint64_t seed,
                            double svm_tol) {
  if (high_bags.empty() || low_bags.empty())
    throw Error("high_vs_low: both sides must be non-empty");
  if (c_grid.empty()) throw Error("high_vs_low: empty C grid");

  std::unordered_set<std::size_t> high, low;
  for (std::size_t k : high_bags)
    high.insert(bags[k].members.begin(), bags[k].members.end());
  for (std::size_t k : low_bags)
    low.insert(bags[k].members.begin(), bags[k].members.end());

  HighVsLowResult res;
  std::vector<std::size_t> rows;
  std::vector<int> noisy;
  std::size_t overlap = 0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    bool h = high.count(i) > 0, l = low.count(i) > 0;
    if (h && l) {
      ++overlap;
      continue;
    }
    if (h || l) {
      rows.push_back(i);
      noisy.push_back(h ? +1 : -1);
    }
  }
  if (overlap > 0)
    res.warnings.push_back(std::to_string(overlap) +
                           " instances in both sides were dropped");
  if (rows.empty()) throw Error("high_vs_low: no usable instances");
  bool has_pos = false, has_neg = false;
  for (int y : noisy) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw Error("high_vs_low: one side is empty after overlap removal");

  FeatureMatrix sub = features.select_rows(rows);

  // standard K-fold CV accuracy on the noisy labels
  std::vector<std::size_t> perm(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng = Rng::derive(seed, 0xb45e);
  rng.shuffle(perm);
  n_folds = std::min(n_folds, perm.size());

  res.cv_accuracy.assign(c_grid.size(), 0.0);
  for (std::size_t c = 0; c < c_grid.size(); ++c) {
    double acc_total = 0.0;
    std::size_t acc_count = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      std::size_t b = f * perm.size() / n_folds;
      std::size_t e = (f + 1) * perm.size() / n_folds;
      if (b == e) continue;
      std::vector<std::size_t> tr;
      std::vector<int> tr_labels, te_labels;
      std::vector<std::size_t> te;
      for (std::size_t s = 0; s < perm.size(); ++s) {
        if (s >= b && s < e) {
          te.push_back(perm[s]);
          te_labels.push_back(noisy[perm[s]]);
        } else {
          tr.push_back(perm[s]);
          tr_labels.push_back(noisy[perm[s]]);
        }
      }
      bool pos = false, neg = false;
      for (int y : tr_labels) (y == 1 ? pos : neg) = true;
      if (!pos || !neg) continue;
      FeatureMatrix tr_m = sub.select_rows(tr);
      FeatureMatrix te_m = sub.select_rows(te);
      SvmProblem p;
      p.features = &tr_m;
      p.labels.assign(tr_labels.begin(), tr_labels.end());
      p.costs = class_weighted_costs(tr_labels, c_grid[c]);
      Model m = train_svm(p, svm_tol, 2000, Rng::derive(seed, c + 1, f + 1).next_u64()).model;
      auto preds = predict_labels(m, te_m);
      acc_total += accuracy(preds, te_labels);
      ++acc_count;
    }
    res.cv_accuracy[c] = acc_count > 0 ? acc_total / acc_count : 0.0;
  }

  // best mean accuracy; ties toward the smaller C
  std::size_t best = 0;
  for (std::size_t c = 1; c < c_grid.size(); ++c) {
    bool better = res.cv_accuracy[c] > res.cv_accuracy[best] + 1e-12;
    bool tie_smaller = std::fabs(res.cv_accuracy[c] - res.cv_accuracy[best]) <= 1e-12 &&
                       c_grid[c] < c_grid[best];
    if (better || tie_smaller) best = c;
  }
  res.selected_C = c_grid[best];

  SvmProblem p;
  p.features = &sub;
  p.labels.assign(noisy.begin(), noisy.end());
  p.costs = class_weighted_costs(noisy, res.selected_C);
  res.model = train_svm(p, svm_tol, 2000, Rng::derive(seed, 0xf17a).next_u64()).model;
  res.model.has_bias = features.has_bias();
  res.model.bias_index = features.bias_index();
  return res;
}

namespace {

void generate_points(std::size_t count, int label, const SyntheticConfig& cfg,
                     Rng& rng, FeatureMatrix& m, std::vector<int>& labels) {
  std::vector<std::uint32_t> idx(cfg.n_features);
  std::vector<double> val(cfg.n_features);
  for (std::uint32_t j = 0; j < cfg.n_features; ++j) idx[j] = j;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < cfg.n_features; ++j) {
      double center =
          j < cfg.n_informative ? label * cfg.class_sep : 0.0;
      val[j] = center + rng.normal();
    }
    m.add_row(idx, val);
    labels.push_back(label);
  }
}

}  // namespace

SyntheticData make_synthetic_bags(const SyntheticConfig& cfg) {
  if (cfg.bag_sizes.size() != cfg.proportions.size())
    throw Error("make_synthetic_bags: sizes/proportions length mismatch");
  if (cfg.n_informative > cfg.n_features)
    throw Error("make_synthetic_bags: n_informative > n_features");
  for (double p : cfg.proportions)
    if (p < 0.0 || p > 1.0) throw Error("make_synthetic_bags: proportion outside [0,1]");

  std::size_t need_pos = 0, need_neg = 0;
  std::vector<std::size_t> pos_per_bag;
  for (std::size_t k = 0; k < cfg.bag_sizes.size(); ++k) {
    auto np = static_cast<std::size_t>(std::floor(cfg.proportions[k] *
                                                  static_cast<double>(cfg.bag_sizes[k])));
    pos_per_bag.push_back(np);
    need_pos += np;
    need_neg += cfg.bag_sizes[k] - np;
  }

  SyntheticData data;
  data.features = FeatureMatrix(cfg.n_features);
  Rng rng(cfg.seed);
  generate_points(need_pos, +1, cfg, rng, data.features, data.labels);
  generate_points(need_neg, -1, cfg, rng, data.features, data.labels);

  // deal the shuffled pools into bags
  std::vector<std::size_t> pos_pool(need_pos), neg_pool(need_neg);
  for (std::size_t i = 0; i < need_pos; ++i) pos_pool[i] = i;
  for (std::size_t i = 0; i < need_neg; ++i) neg_pool[i] = need_pos + i;
  rng.shuffle(pos_pool);
  rng.shuffle(neg_pool);
  std::size_t pi = 0, ni = 0;
  for (std::size_t k = 0; k < cfg.bag_sizes.size(); ++k) {
    Bag b;
    b.name = "bag" + std::to_string(k + 1);
    for (std::size_t j = 0; j < pos_per_bag[k]; ++j) b.members.push_back(pos_pool[pi++]);
    for (std::size_t j = 0; j < cfg.bag_sizes[k] - pos_per_bag[k]; ++j)
      b.members.push_back(neg_pool[ni++]);
    std::sort(b.members.begin(), b.members.end());
    data.bags.bags.push_back(std::move(b));
  }
  return data;
}

SyntheticData make_synthetic_points(std::size_t n_pos, std::size_t n_neg,
                                    const SyntheticConfig& cfg,
                                    std::uint64_t seed) {
  SyntheticData data;
  data.features = FeatureMatrix(cfg.n_features);
  Rng rng(seed);
  generate_points(n_pos, +1, cfg, rng, data.features, data.labels);
  generate_points(n_neg, -1, cfg, rng, data.features, data.labels);
  return data;
}

ConstraintSet factor_constraints(std::span<const double> true_p, double u_m,
                                 double l_p, double l_d) {
  auto clip = [](double v) { return std::min(std::max(v, 0.0), 1.0); };
  ConstraintSet cons;
  if (true_p.empty()) return cons;

  std::size_t k_max = 0;
  for (std::size_t k = 1; k < true_p.size(); ++k)
    if (true_p[k] > true_p[k_max]) k_max = k;

  for (std::size_t k = 0; k < true_p.size(); ++k) {
    BoundConstraint b;
    b.bag = k;
    b.lower = clip(l_p * true_p[k]);
    b.upper = k == k_max ? clip(u_m * true_p[k]) : 1.0;
    cons.bounds.push_back(b);
  }
  for (std::size_t k1 = 0; k1 < true_p.size(); ++k1)
    for (std::size_t k2 = 0; k2 < true_p.size(); ++k2) {
      if (k1 == k2 || true_p[k1] < true_p[k2]) continue;
      DifferenceConstraint d;
      d.upper_bag = k1;
      d.lower_bag = k2;
      d.lower = clip(l_d * (true_p[k1] - true_p[k2]));
      d.upper = 1.0;
      cons.differences.push_back(d);
    }
  return cons;
}

std::vector<SensitivityRow> sensitivity_scan(const SensitivityInputs& in,
                                             const std::string& factor,
                                             std::span<const double> values) {
  std::vector<SensitivityRow> rows;
  for (double v : values) {
    double u_m = in.u_m, l_p = in.l_p, l_d = in.l_d;
    if (factor == "um")
      u_m = v;
    else if (factor == "lp")
      l_p = v;
    else if (factor == "ld")
      l_d = v;
    else
      throw Error("sensitivity_scan: unknown factor '" + factor + "'");

    ConstraintSet cons = factor_constraints(in.true_p, u_m, l_p, l_d);
    SensitivityRow row;
    row.factor = factor;
    row.value = v;

    LabeledSet no_labels;
    auto rep = check_feasibility(*in.bags, cons, no_labels,
                                 in.train_features->rows(), in.hp.lp_feas_tol);
    if (!rep.feasible) {
      row.status = "infeasible";
      rows.push_back(std::move(row));
      continue;
    }
    FitOptions fo;
    fo.seed = in.seed;
    FitResult fit = fit_ballpark(*in.train_features, *in.bags, cons, no_labels,
                                 in.hp, fo);
    if (fit.trace.status == FitStatus::infeasible) {
      row.status = "infeasible";
      rows.push_back(std::move(row));
      continue;
    }
    auto preds = predict_labels(fit.model, *in.eval_features);
    row.accuracy = accuracy(preds, in.eval_labels);
    row.status = "ok";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::ostringstream os;
  os << "factor,value,accuracy,status\n";
  for (const auto& r : rows) {
    os << r.factor << ',' << r.value << ',';
    if (r.status == "ok") os << r.accuracy;
    os << ',' << r.status << '\n';
  }
  return os.str();
}

}  // namespace ballpark
