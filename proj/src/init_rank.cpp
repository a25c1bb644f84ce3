#include "ballpark/init_rank.hpp"

#include <cmath>

namespace ballpark {

BagMeanSet bag_means(const FeatureMatrix& features, const BagSet& bags) {
  BagMeanSet out;
  out.dim = features.cols();
  out.means.reserve(bags.size());
  for (const Bag& b : bags) {
    if (b.members.empty()) throw Error("bag_means: empty bag '" + b.name + "'");
    std::vector<double> mu(out.dim, 0.0);
    for (std::size_t i : b.members) {
      if (i >= features.rows())
        throw Error("bag_means: member index out of range in bag '" + b.name + "'");
      features.axpy_row(i, 1.0, mu.data());
    }
    double inv = 1.0 / static_cast<double>(b.members.size());
    for (double& v : mu) v *= inv;
    out.means.push_back(std::move(mu));
  }
  return out;
}

Model solve_init(const BagMeanSet& means,
                 std::span<const std::pair<std::size_t, std::size_t>> orderings,
                 const FeatureMatrix* labeled_features,
                 std::span<const int> labeled_labels, double c_labeled,
                 double svm_tol, std::uint64_t seed) {
  const std::size_t n_labeled = labeled_features ? labeled_features->rows() : 0;
  if (orderings.empty() && n_labeled == 0)
    throw Error("solve_init: nothing to initialize from (no orderings, no labels)");

  FeatureMatrix rows(means.dim);
  SvmProblem prob;
  std::vector<std::pair<std::uint32_t, double>> entries;

  const double cost_p =
      orderings.empty() ? 0.0 : 1.0 / static_cast<double>(orderings.size());
  for (const auto& [k1, k2] : orderings) {
    if (k1 >= means.means.size() || k2 >= means.means.size())
      throw Error("solve_init: ordering references unknown bag");
    entries.clear();
    const auto& a = means.means[k1];
    const auto& b = means.means[k2];
    for (std::size_t j = 0; j < means.dim; ++j) {
      double d = a[j] - b[j];
      if (d != 0.0) entries.emplace_back(static_cast<std::uint32_t>(j), d);
    }
    rows.add_row(entries);
    prob.labels.push_back(1.0);
    prob.costs.push_back(cost_p);
  }

  if (n_labeled > 0) {
    if (labeled_labels.size() != n_labeled)
      throw Error("solve_init: labeled label count mismatch");
    if (labeled_features->cols() != means.dim)
      throw Error("solve_init: labeled feature dimension mismatch");
    const double cl = c_labeled / static_cast<double>(n_labeled);
    for (std::size_t i = 0; i < n_labeled; ++i) {
      auto r = labeled_features->row(i);
      rows.add_row(r.idx, r.val);
      prob.labels.push_back(static_cast<double>(labeled_labels[i]));
      prob.costs.push_back(cl);
    }
  }

  prob.features = &rows;
  bool any = false;
  for (double c : prob.costs) any = any || c > 0.0;
  if (!any) {
    // all costs zero (e.g. C_L = 0 with no orderings is excluded above, but
    // C_L = 0 with only labeled rows lands here): regularizer alone -> w = 0
    Model m;
    m.weights.assign(means.dim, 0.0);
    return m;
  }
  return train_svm(prob, svm_tol, 4000, seed).model;
}

}  // namespace ballpark
