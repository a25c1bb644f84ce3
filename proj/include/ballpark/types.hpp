#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ballpark {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sparse instance-by-feature matrix (CSR) with an optional all-ones bias
// column appended as the last feature.
class FeatureMatrix {
 public:
  struct Row {
    std::span<const std::uint32_t> idx;
    std::span<const double> val;
    std::size_t nnz() const { return idx.size(); }
  };

  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t n_cols) : n_cols_(n_cols) {}

  std::size_t rows() const { return row_start_.size() - 1; }
  std::size_t cols() const { return n_cols_; }
  bool has_bias() const { return has_bias_; }
  std::size_t bias_index() const { return bias_index_; }

  Row row(std::size_t i) const {
    std::size_t b = row_start_[i], e = row_start_[i + 1];
    return {std::span(col_idx_).subspan(b, e - b),
            std::span(values_).subspan(b, e - b)};
  }

  // entries must be sorted by column index, strictly ascending
  void add_row(std::span<const std::pair<std::uint32_t, double>> entries);
  void add_row(std::initializer_list<std::pair<std::uint32_t, double>> entries) {
    add_row(std::span<const std::pair<std::uint32_t, double>>(entries.begin(),
                                                              entries.size()));
  }
  void add_row(std::span<const std::uint32_t> idx, std::span<const double> val);

  double dot_row(std::size_t i, const double* dense) const;
  double row_sq_norm(std::size_t i) const;
  // dense += alpha * row(i)
  void axpy_row(std::size_t i, double alpha, double* dense) const;

  // submatrix with the given rows, in the given order
  FeatureMatrix select_rows(std::span<const std::size_t> which) const;

  void set_bias(std::size_t index) { has_bias_ = true; bias_index_ = index; }
  void set_cols(std::size_t n) { n_cols_ = n; }

  std::vector<std::string> check_invariants() const;

  // stable content hash (used to assert pipelines share featurization)
  std::uint64_t content_hash() const;

 private:
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
  std::vector<std::size_t> row_start_{0};
  std::size_t n_cols_ = 0;
  bool has_bias_ = false;
  std::size_t bias_index_ = 0;
};

struct Bag {
  std::string name;
  std::vector<std::size_t> members;  // instance indices; may include labeled ones
};

struct BagSet {
  std::vector<Bag> bags;

  std::size_t size() const { return bags.size(); }
  const Bag& operator[](std::size_t k) const { return bags[k]; }
  auto begin() const { return bags.begin(); }
  auto end() const { return bags.end(); }
  std::optional<std::size_t> find(const std::string& name) const;
};

// l_k <= p_k <= u_k for one bag
struct BoundConstraint {
  std::size_t bag = 0;
  double lower = 0.0;
  double upper = 1.0;
};

// l <= p[upper_bag] - p[lower_bag] <= u
struct DifferenceConstraint {
  std::size_t upper_bag = 0;
  std::size_t lower_bag = 0;
  double lower = 0.0;
  double upper = 1.0;
};

struct ConstraintSet {
  std::vector<BoundConstraint> bounds;
  std::vector<DifferenceConstraint> differences;
  // extra (k1,k2) pairs meaning p_{k1} >= p_{k2}, used only by the initializer
  std::vector<std::pair<std::size_t, std::size_t>> extra_orderings;

  bool empty() const {
    return bounds.empty() && differences.empty() && extra_orderings.empty();
  }
};

// labeled instances occupy indices [n_unlabeled, n_unlabeled + size)
struct LabeledSet {
  std::vector<std::pair<std::size_t, int>> entries;  // (index, label in {-1,+1})

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// continuous relaxed labels, each in [-1, 1]
struct LabelVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

enum class DescentMode { sign, exact };

struct Hyperparams {
  double C = 1.0;
  double C_L = 0.0;
  int max_outer_iters = 200;
  double rel_tol = 1e-5;
  double lp_feas_tol = 1e-8;
  double svm_tol = 1e-4;
  DescentMode descent_mode = DescentMode::sign;
};

inline int sign_or_positive(double v) { return v >= 0.0 ? +1 : -1; }

// --- core operations -------------------------------------------------------

// Ground-truth proportion of +1 labels in a bag. `labels` spans all
// instances; 0 marks an unlabeled instance and is an error to encounter.
double bag_proportion(std::span<const int> labels, const Bag& bag);

// Estimated proportion p_hat = sum(y_i)/(2|B|) + 1/2 with labeled members
// contributing their fixed label. Indices < y.size() read from y, indices in
// [y.size(), y.size()+L) read from `labeled`.
double estimated_proportion(const LabelVector& y, const LabeledSet& labeled,
                            const Bag& bag);

// Checks every type invariant; returns all violations (empty == ok).
std::vector<std::string> validate(const BagSet& bags, const ConstraintSet& cons,
                                  std::size_t n_unlabeled, std::size_t n_labeled);

// P = extra_orderings followed by (upper_bag, lower_bag) of each difference,
// deduplicated, input order preserved.
std::vector<std::pair<std::size_t, std::size_t>> derive_orderings(
    const ConstraintSet& cons);

std::vector<std::string> check_hyperparams(const Hyperparams& hp);

}  // namespace ballpark
