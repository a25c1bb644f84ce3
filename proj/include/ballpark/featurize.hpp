#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ballpark/types.hpp"

namespace ballpark {

// TF-IDF vocabulary. idf(t) = ln((1 + n_docs)/(1 + df(t))) + 1; rows are
// raw term counts times idf, then L2-normalized. Column order is
// first-appearance order over the fitting corpus.
struct Vocabulary {
  std::vector<std::string> tokens;                      // column -> token
  std::unordered_map<std::string, std::uint32_t> index; // token -> column
  std::vector<std::uint32_t> df;
  std::vector<double> idf;
  std::size_t n_docs = 0;

  std::size_t size() const { return tokens.size(); }
};

// lowercase, split on non-alphanumeric runs, drop pure-digit tokens and
// tokens of length 1
std::vector<std::string> tokenize(const std::string& text);

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t min_df = 1);

// sparse L2-normalized row; unknown tokens dropped, all-unknown -> zero row
std::vector<std::pair<std::uint32_t, double>> transform_tfidf(
    const std::vector<std::string>& doc, const Vocabulary& vocab);

FeatureMatrix tfidf_matrix(const std::vector<std::vector<std::string>>& docs,
                           const Vocabulary& vocab);

// One-hot + standardized-numeric encoding for tabular data.
struct TabularSchema {
  struct NumericColumn {
    std::string name;
    double mean = 0.0;
    double stddev = 1.0;  // population std at fit time
  };
  struct CategoricalColumn {
    std::string name;
    std::vector<std::string> categories;  // offset order = first appearance
    std::unordered_map<std::string, std::uint32_t> offset;
  };
  std::vector<NumericColumn> numeric;
  std::vector<CategoricalColumn> categorical;
  std::size_t dim = 0;
};

// rows are (column name -> raw string value); numeric_cols values must parse
// as doubles
TabularSchema fit_tabular(
    const std::vector<std::unordered_map<std::string, std::string>>& rows,
    const std::vector<std::string>& numeric_cols,
    const std::vector<std::string>& categorical_cols);

FeatureMatrix encode_tabular(
    const std::vector<std::unordered_map<std::string, std::string>>& rows,
    const TabularSchema& schema);

// appends one all-ones column; errors if a bias is already present
FeatureMatrix append_bias(const FeatureMatrix& m);

}  // namespace ballpark
