#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ballpark/svm.hpp"
#include "ballpark/types.hpp"

namespace ballpark {

struct BagMeanSet {
  std::vector<std::vector<double>> means;  // one dense vector per bag
  std::size_t dim = 0;
};

// exact arithmetic means of each bag's feature rows (bias column included)
BagMeanSet bag_means(const FeatureMatrix& features, const BagSet& bags);

// Initial weights from the bag-mean ranking program: each ordering (k1,k2)
// becomes a pseudo-instance with features mu_k1 - mu_k2, label +1 and cost
// 1/|P|; labeled instances join with cost C_L/L. Margin 1 (not 0) so the
// program has a non-trivial optimum.
Model solve_init(const BagMeanSet& means,
                 std::span<const std::pair<std::size_t, std::size_t>> orderings,
                 const FeatureMatrix* labeled_features,
                 std::span<const int> labeled_labels, double c_labeled,
                 double svm_tol = 1e-6, std::uint64_t seed = 1);

}  // namespace ballpark
