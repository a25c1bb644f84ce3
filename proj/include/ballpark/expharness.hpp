#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ballpark/alternator.hpp"
#include "ballpark/types.hpp"

namespace ballpark {

double accuracy(std::span<const int> preds, std::span<const int> labels);
double macro_f1(std::span<const int> preds, std::span<const int> labels);

struct HighVsLowResult {
  Model model;
  double selected_C = 0.0;
  std::vector<double> cv_accuracy;  // per grid C, on the noisy labels
  std::vector<std::string> warnings;
};

// "high vs. low" baseline: pretend the high bags are all positive and the
// low bags all negative, fit a class-weighted SVM, pick C by standard K-fold
// CV accuracy on the noisy labels. Instances in both sides are dropped.
HighVsLowResult high_vs_low(const FeatureMatrix& features, const BagSet& bags,
                            std::span<const std::size_t> high_bags,
                            std::span<const std::size_t> low_bags,
                            const std::vector<double>& c_grid,
                            std::size_t n_folds, std::uint64_t seed,
                            double svm_tol = 1e-4);

struct SyntheticConfig {
  std::size_t n_features = 20;
  std::size_t n_informative = 1;
  double class_sep = 1.0;
  std::vector<std::size_t> bag_sizes;
  std::vector<double> proportions;  // target positive proportion per bag
  std::uint64_t seed = 1;
};

struct SyntheticData {
  FeatureMatrix features;  // no bias column
  std::vector<int> labels;
  BagSet bags;
};

// Two Gaussian class-conditional clusters separated by 2*class_sep along the
// informative dimensions, standard-normal noise elsewhere. Bag k receives
// floor(p_k * |B_k|) positives, sampled without replacement.
SyntheticData make_synthetic_bags(const SyntheticConfig& cfg);

// iid points from the same generative model (held-out evaluation data)
SyntheticData make_synthetic_points(std::size_t n_pos, std::size_t n_neg,
                                    const SyntheticConfig& cfg,
                                    std::uint64_t seed);

// Constraints assembled from true proportions and multiplicative factors:
// upper bound p_max*u_m on the max-proportion bag only, lower bounds l_p*p_k
// on every bag, and difference lower bounds l_d*(p_k1 - p_k2) for every
// ordered pair with p_k1 >= p_k2 (k1 != k2). Values are clipped into [0,1].
ConstraintSet factor_constraints(std::span<const double> true_p, double u_m,
                                 double l_p, double l_d);

struct SensitivityRow {
  std::string factor;
  double value = 0.0;
  double accuracy = 0.0;
  std::string status;  // "ok" | "infeasible"
};

struct SensitivityInputs {
  const FeatureMatrix* train_features = nullptr;
  const BagSet* bags = nullptr;
  std::vector<double> true_p;  // per bag
  const FeatureMatrix* eval_features = nullptr;
  std::span<const int> eval_labels;
  Hyperparams hp;
  std::uint64_t seed = 1;
  double u_m = 1.0, l_p = 0.5, l_d = 1.0;  // defaults while another factor varies
};

// One factor varied per scan, the others fixed at the configured defaults.
std::vector<SensitivityRow> sensitivity_scan(const SensitivityInputs& in,
                                             const std::string& factor,
                                             std::span<const double> values);

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

}  // namespace ballpark
