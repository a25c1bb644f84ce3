#include "ballpark/featurize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ballpark {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) {
      bool all_digit = std::all_of(cur.begin(), cur.end(), [](unsigned char c) {
        return std::isdigit(c);
      });
      if (!all_digit) out.push_back(cur);
    }
    cur.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c))
      cur.push_back(static_cast<char>(std::tolower(c)));
    else
      flush();
  }
  flush();
  return out;
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t min_df) {
  if (corpus.empty()) throw Error("fit_vocabulary: empty corpus");

  // document frequencies in first-appearance order
  std::vector<std::string> order;
  std::unordered_map<std::string, std::uint32_t> df_map;
  for (const auto& doc : corpus) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& t : doc) {
      if (seen.emplace(t, true).second) {
        auto [it, inserted] = df_map.emplace(t, 1u);
        if (inserted)
          order.push_back(t);
        else
          ++it->second;
      }
    }
  }

  Vocabulary v;
  v.n_docs = corpus.size();
  for (const auto& t : order) {
    std::uint32_t df = df_map[t];
    if (df < min_df) continue;
    v.index.emplace(t, static_cast<std::uint32_t>(v.tokens.size()));
    v.tokens.push_back(t);
    v.df.push_back(df);
    v.idf.push_back(std::log((1.0 + v.n_docs) / (1.0 + df)) + 1.0);
  }
  return v;
}

std::vector<std::pair<std::uint32_t, double>> transform_tfidf(
    const std::vector<std::string>& doc, const Vocabulary& vocab) {
  std::unordered_map<std::uint32_t, double> counts;
  for (const auto& t : doc) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  std::vector<std::pair<std::uint32_t, double>> row;
  row.reserve(counts.size());
  for (const auto& [col, cnt] : counts)
    row.emplace_back(col, cnt * vocab.idf[col]);
  std::sort(row.begin(), row.end());

  double sq = 0.0;
  for (const auto& [col, val] : row) sq += val * val;
  if (sq > 0.0) {
    double inv = 1.0 / std::sqrt(sq);
    for (auto& [col, val] : row) val *= inv;
  }
  return row;
}

FeatureMatrix tfidf_matrix(const std::vector<std::vector<std::string>>& docs,
                           const Vocabulary& vocab) {
  FeatureMatrix m(vocab.size());
  for (const auto& d : docs) {
    auto row = transform_tfidf(d, vocab);
    m.add_row(row);
  }
  return m;
}

TabularSchema fit_tabular(
    const std::vector<std::unordered_map<std::string, std::string>>& rows,
    const std::vector<std::string>& numeric_cols,
    const std::vector<std::string>& categorical_cols) {
  if (rows.empty()) throw Error("fit_tabular: no rows");
  {
    std::vector<std::string> all(numeric_cols);
    all.insert(all.end(), categorical_cols.begin(), categorical_cols.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw Error("fit_tabular: duplicate column name");
  }

  TabularSchema s;
  for (const auto& name : numeric_cols) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& r : rows) {
      auto it = r.find(name);
      if (it == r.end()) throw Error("fit_tabular: missing column '" + name + "'");
      double x = std::stod(it->second);
      sum += x;
      sum_sq += x * x;
    }
    double n = static_cast<double>(rows.size());
    double mean = sum / n;
    double var = sum_sq / n - mean * mean;
    s.numeric.push_back({name, mean, var > 0.0 ? std::sqrt(var) : 0.0});
  }
  for (const auto& name : categorical_cols) {
    TabularSchema::CategoricalColumn col;
    col.name = name;
    for (const auto& r : rows) {
      auto it = r.find(name);
      if (it == r.end()) throw Error("fit_tabular: missing column '" + name + "'");
      if (col.offset.emplace(it->second, static_cast<std::uint32_t>(col.categories.size())).second)
        col.categories.push_back(it->second);
    }
    s.categorical.push_back(std::move(col));
  }
  s.dim = s.numeric.size();
  for (const auto& c : s.categorical) s.dim += c.categories.size();
  return s;
}

FeatureMatrix encode_tabular(
    const std::vector<std::unordered_map<std::string, std::string>>& rows,
    const TabularSchema& schema) {
  FeatureMatrix m(schema.dim);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (const auto& r : rows) {
    row.clear();
    std::uint32_t base = 0;
    for (const auto& nc : schema.numeric) {
      auto it = r.find(nc.name);
      if (it == r.end()) throw Error("encode_tabular: missing column '" + nc.name + "'");
      double x = std::stod(it->second);
      double z = nc.stddev > 0.0 ? (x - nc.mean) / nc.stddev : 0.0;
      if (z != 0.0) row.emplace_back(base, z);
      ++base;
    }
    for (const auto& cc : schema.categorical) {
      auto it = r.find(cc.name);
      if (it == r.end()) throw Error("encode_tabular: missing column '" + cc.name + "'");
      auto off = cc.offset.find(it->second);
      if (off == cc.offset.end())
        throw Error("encode_tabular: unseen category '" + it->second +
                    "' in column '" + cc.name + "'");
      row.emplace_back(base + off->second, 1.0);
      base += static_cast<std::uint32_t>(cc.categories.size());
    }
    m.add_row(row);
  }
  return m;
}

FeatureMatrix append_bias(const FeatureMatrix& m) {
  if (m.has_bias()) throw Error("append_bias: matrix already has a bias column");
  FeatureMatrix out(m.cols() + 1);
  const auto bias_col = static_cast<std::uint32_t>(m.cols());
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    idx.assign(r.idx.begin(), r.idx.end());
    val.assign(r.val.begin(), r.val.end());
    idx.push_back(bias_col);
    val.push_back(1.0);
    out.add_row(idx, val);
  }
  out.set_bias(bias_col);
  return out;
}

}  // namespace ballpark
