#include "ballpark/types.hpp"

#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ballpark/kernels.hpp"

namespace ballpark {

void FeatureMatrix::add_row(
    std::span<const std::pair<std::uint32_t, double>> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first <= entries[i - 1].first)
      throw Error("FeatureMatrix row indices must be strictly ascending");
    if (entries[i].first >= n_cols_)
      throw Error("FeatureMatrix column index out of range");
    col_idx_.push_back(entries[i].first);
    values_.push_back(entries[i].second);
  }
  row_start_.push_back(col_idx_.size());
}

void FeatureMatrix::add_row(std::span<const std::uint32_t> idx,
                            std::span<const double> val) {
  if (idx.size() != val.size()) throw Error("index/value length mismatch");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && idx[i] <= idx[i - 1])
      throw Error("FeatureMatrix row indices must be strictly ascending");
    if (idx[i] >= n_cols_) throw Error("FeatureMatrix column index out of range");
    col_idx_.push_back(idx[i]);
    values_.push_back(val[i]);
  }
  row_start_.push_back(col_idx_.size());
}

double FeatureMatrix::dot_row(std::size_t i, const double* dense) const {
  std::size_t b = row_start_[i];
  return kernels::sparse_dot(col_idx_.data() + b, values_.data() + b,
                             row_start_[i + 1] - b, dense);
}

double FeatureMatrix::row_sq_norm(std::size_t i) const {
  std::size_t b = row_start_[i];
  return kernels::dot(values_.data() + b, values_.data() + b,
                      row_start_[i + 1] - b);
}

void FeatureMatrix::axpy_row(std::size_t i, double alpha, double* dense) const {
  for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
    dense[col_idx_[k]] += alpha * values_[k];
}

FeatureMatrix FeatureMatrix::select_rows(
    std::span<const std::size_t> which) const {
  FeatureMatrix out(n_cols_);
  out.has_bias_ = has_bias_;
  out.bias_index_ = bias_index_;
  for (std::size_t i : which) {
    if (i >= rows()) throw Error("select_rows: row index out of range");
    Row r = row(i);
    out.add_row(r.idx, r.val);
  }
  return out;
}

std::vector<std::string> FeatureMatrix::check_invariants() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rows(); ++i) {
    Row r = row(i);
    bool bias_seen = false;
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      if (k > 0 && r.idx[k] <= r.idx[k - 1]) {
        out.push_back("row " + std::to_string(i) + ": indices not ascending");
        break;
      }
      if (r.idx[k] >= n_cols_)
        out.push_back("row " + std::to_string(i) + ": index out of range");
      if (!std::isfinite(r.val[k]))
        out.push_back("row " + std::to_string(i) + ": non-finite value");
      if (has_bias_ && r.idx[k] == bias_index_ && r.val[k] == 1.0)
        bias_seen = true;
    }
    if (has_bias_ && !bias_seen)
      out.push_back("row " + std::to_string(i) + ": missing bias entry");
  }
  return out;
}

std::uint64_t FeatureMatrix::content_hash() const {
  // FNV-1a over the raw storage
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  };
  mix(col_idx_.data(), col_idx_.size() * sizeof(std::uint32_t));
  mix(values_.data(), values_.size() * sizeof(double));
  mix(row_start_.data(), row_start_.size() * sizeof(std::size_t));
  mix(&n_cols_, sizeof(n_cols_));
  return h;
}

std::optional<std::size_t> BagSet::find(const std::string& name) const {
  for (std::size_t k = 0; k < bags.size(); ++k)
    if (bags[k].name == name) return k;
  return std::nullopt;
}

double bag_proportion(std::span<const int> labels, const Bag& bag) {
  if (bag.members.empty()) throw Error("bag_proportion: empty bag");
  std::size_t pos = 0;
  for (std::size_t i : bag.members) {
    if (i >= labels.size())
      throw Error("bag_proportion: member index out of range");
    int y = labels[i];
    if (y != 1 && y != -1)
      throw Error("bag_proportion: unlabeled member (index " +
                  std::to_string(i) + ")");
    if (y == 1) ++pos;
  }
  return static_cast<double>(pos) / static_cast<double>(bag.members.size());
}

double estimated_proportion(const LabelVector& y, const LabeledSet& labeled,
                            const Bag& bag) {
  if (bag.members.empty()) throw Error("estimated_proportion: empty bag");
  const std::size_t n = y.size();
  std::unordered_map<std::size_t, int> fixed;
  fixed.reserve(labeled.size());
  for (const auto& [idx, lab] : labeled.entries) fixed.emplace(idx, lab);

  double s = 0.0;
  for (std::size_t i : bag.members) {
    if (i < n) {
      s += y[i];
    } else {
      auto it = fixed.find(i);
      if (it == fixed.end())
        throw Error("estimated_proportion: member index " + std::to_string(i) +
                    " out of range");
      s += it->second;
    }
  }
  return s / (2.0 * static_cast<double>(bag.members.size())) + 0.5;
}

std::vector<std::string> validate(const BagSet& bags, const ConstraintSet& cons,
                                  std::size_t n_unlabeled,
                                  std::size_t n_labeled) {
  std::vector<std::string> v;
  const std::size_t total = n_unlabeled + n_labeled;

  std::unordered_set<std::string> names;
  for (std::size_t k = 0; k < bags.size(); ++k) {
    const Bag& b = bags[k];
    if (b.members.empty())
      v.push_back("bag '" + b.name + "': empty");
    if (!names.insert(b.name).second)
      v.push_back("bag name '" + b.name + "' not unique");
    std::unordered_set<std::size_t> seen;
    for (std::size_t i : b.members) {
      if (i >= total)
        v.push_back("bag '" + b.name + "': member index " + std::to_string(i) +
                    " out of range");
      if (!seen.insert(i).second)
        v.push_back("bag '" + b.name + "': duplicate member " + std::to_string(i));
    }
  }

  auto bag_ok = [&](std::size_t k) { return k < bags.size(); };
  auto bag_name = [&](std::size_t k) {
    return bag_ok(k) ? bags[k].name : ("#" + std::to_string(k));
  };

  for (const auto& b : cons.bounds) {
    if (!bag_ok(b.bag)) v.push_back("bound references unknown bag " + bag_name(b.bag));
    if (!(b.lower >= 0.0 && b.lower <= 1.0) || !(b.upper >= 0.0 && b.upper <= 1.0))
      v.push_back("bound on '" + bag_name(b.bag) + "': values outside [0,1]");
    if (b.lower > b.upper)
      v.push_back("bound on '" + bag_name(b.bag) + "': lower exceeds upper");
  }
  for (const auto& d : cons.differences) {
    if (!bag_ok(d.upper_bag))
      v.push_back("difference references unknown bag " + bag_name(d.upper_bag));
    if (!bag_ok(d.lower_bag))
      v.push_back("difference references unknown bag " + bag_name(d.lower_bag));
    if (d.upper_bag == d.lower_bag)
      v.push_back("difference pair (" + bag_name(d.upper_bag) + "," +
                  bag_name(d.lower_bag) + ") references the same bag");
    if (!(d.lower >= 0.0 && d.lower <= 1.0) || !(d.upper >= 0.0 && d.upper <= 1.0))
      v.push_back("difference (" + bag_name(d.upper_bag) + "," +
                  bag_name(d.lower_bag) + "): values outside [0,1]");
    if (d.lower > d.upper)
      v.push_back("difference (" + bag_name(d.upper_bag) + "," +
                  bag_name(d.lower_bag) + "): lower exceeds upper");
  }
  for (const auto& [a, b] : cons.extra_orderings) {
    if (!bag_ok(a) || !bag_ok(b))
      v.push_back("ordering references unknown bag");
    else if (a == b)
      v.push_back("ordering (" + bag_name(a) + "," + bag_name(b) +
                  ") references the same bag");
  }
  return v;
}

std::vector<std::pair<std::size_t, std::size_t>> derive_orderings(
    const ConstraintSet& cons) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto push = [&](std::size_t a, std::size_t b) {
    if (seen.emplace(a, b).second) out.emplace_back(a, b);
  };
  for (const auto& [a, b] : cons.extra_orderings) push(a, b);
  for (const auto& d : cons.differences) push(d.upper_bag, d.lower_bag);
  return out;
}

std::vector<std::string> check_hyperparams(const Hyperparams& hp) {
  std::vector<std::string> v;
  if (!(hp.C >= 0.0)) v.push_back("C must be >= 0");
  if (!(hp.C_L >= 0.0)) v.push_back("C_L must be >= 0");
  if (hp.max_outer_iters <= 0) v.push_back("max_outer_iters must be positive");
  if (!(hp.rel_tol > 0.0)) v.push_back("rel_tol must be > 0");
  if (!(hp.lp_feas_tol > 0.0)) v.push_back("lp_feas_tol must be > 0");
  if (!(hp.svm_tol > 0.0)) v.push_back("svm_tol must be > 0");
  return v;
}

}  // namespace ballpark
