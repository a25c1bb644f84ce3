#include "ballpark/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace ballpark {

using nlohmann::json;

DataFormat parse_format(const std::string& s) {
  if (s == "text-csv") return DataFormat::text_csv;
  if (s == "tabular-csv") return DataFormat::tabular_csv;
  if (s == "svmlight") return DataFormat::svmlight;
  throw Error("unknown format '" + s + "' (expected text-csv, tabular-csv or svmlight)");
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  auto end_field = [&] { row.push_back(std::move(field)); field.clear(); };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < content.size()) {
    char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  if (!field.empty() || !row.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_row();
  }
  return rows;
}

namespace {

int parse_pm_label(const std::string& s, const std::string& where) {
  if (s == "1" || s == "+1") return +1;
  if (s == "-1") return -1;
  throw Error(where + ": label must be +1 or -1, got '" + s + "'");
}

void check_unique_ids(const std::vector<std::string>& ids) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second) throw Error("duplicate id '" + id + "'");
}

}  // namespace

Dataset load_dataset(const std::string& path, DataFormat format,
                     const LoadOptions& opt) {
  Dataset d;
  d.format = format;

  if (format == DataFormat::text_csv) {
    auto rows = read_csv(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() == 1 && row[0].empty()) continue;  // blank line
      if (row.size() != 2 && row.size() != 3)
        throw Error(path + ":" + std::to_string(r + 1) +
                    ": expected id,text[,label]");
      d.ids.push_back(row[0]);
      d.docs.push_back(row[1]);
      if (row.size() == 3) {
        d.truth.push_back(parse_pm_label(row[2], path + ":" + std::to_string(r + 1)));
        d.has_truth = true;
      } else {
        d.truth.push_back(0);
      }
    }
    check_unique_ids(d.ids);
    return d;
  }

  if (format == DataFormat::tabular_csv) {
    auto rows = read_csv(path);
    if (rows.empty()) throw Error(path + ": empty file");
    d.header = rows[0];
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() == 1 && row[0].empty()) continue;
      if (row.size() != d.header.size())
        throw Error(path + ":" + std::to_string(r + 1) + ": expected " +
                    std::to_string(d.header.size()) + " fields, got " +
                    std::to_string(row.size()));
      std::unordered_map<std::string, std::string> rec;
      for (std::size_t c = 0; c < row.size(); ++c) rec[d.header[c]] = row[c];
      if (!opt.id_col.empty()) {
        auto it = rec.find(opt.id_col);
        if (it == rec.end())
          throw Error(path + ": id column '" + opt.id_col + "' not found");
        d.ids.push_back(it->second);
      } else {
        d.ids.push_back(std::to_string(d.rows.size()));
      }
      if (!opt.label_col.empty()) {
        auto it = rec.find(opt.label_col);
        if (it == rec.end())
          throw Error(path + ": label column '" + opt.label_col + "' not found");
        if (!opt.positive_label.empty())
          d.truth.push_back(it->second == opt.positive_label ? +1 : -1);
        else
          d.truth.push_back(parse_pm_label(it->second, path + ":" + std::to_string(r + 1)));
        d.has_truth = true;
      } else {
        d.truth.push_back(0);
      }
      d.rows.push_back(std::move(rec));
    }
    check_unique_ids(d.ids);
    return d;
  }

  // svmlight: "label idx:val idx:val ..." with '?' for unlabeled, 0-based indices
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  std::uint32_t max_index = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> srows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string lab;
    ls >> lab;
    int y;
    if (lab == "?")
      y = 0;
    else
      y = parse_pm_label(lab, path + ":" + std::to_string(lineno));
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::string tok;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw Error(path + ":" + std::to_string(lineno) + ": malformed pair '" + tok + "'");
      try {
        unsigned long idx = std::stoul(tok.substr(0, colon));
        double val = std::stod(tok.substr(colon + 1));
        entries.emplace_back(static_cast<std::uint32_t>(idx), val);
        max_index = std::max(max_index, static_cast<std::uint32_t>(idx));
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(lineno) + ": malformed pair '" + tok + "'");
      }
    }
    std::sort(entries.begin(), entries.end());
    for (std::size_t k = 1; k < entries.size(); ++k)
      if (entries[k].first == entries[k - 1].first)
        throw Error(path + ":" + std::to_string(lineno) + ": duplicate feature index");
    srows.push_back(std::move(entries));
    d.svm_labels.push_back(y);
    d.ids.push_back(std::to_string(d.ids.size()));
  }
  d.sparse = FeatureMatrix(srows.empty() ? 0 : max_index + 1);
  for (const auto& r : srows) d.sparse.add_row(r);
  return d;
}

std::vector<BagSpec> load_bags_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  json j = json::parse(in);
  std::vector<BagSpec> specs;
  for (const auto& b : j.at("bags")) {
    BagSpec spec;
    spec.name = b.at("name").get<std::string>();
    if (b.contains("indices")) {
      spec.selector.kind = BagSelector::Kind::index_list;
      for (const auto& i : b.at("indices"))
        spec.selector.indices.push_back(i.get<std::size_t>());
    } else {
      const auto& sel = b.at("selector");
      std::string type = sel.at("type").get<std::string>();
      if (type == "contains_token") {
        spec.selector.kind = BagSelector::Kind::contains_token;
        spec.selector.token = sel.at("token").get<std::string>();
      } else if (type == "column_equals") {
        spec.selector.kind = BagSelector::Kind::column_equals;
        spec.selector.equals.emplace_back(sel.at("column").get<std::string>(),
                                          sel.at("value").get<std::string>());
        if (sel.contains("and"))
          for (const auto& clause : sel.at("and"))
            spec.selector.equals.emplace_back(clause.at("column").get<std::string>(),
                                              clause.at("value").get<std::string>());
      } else {
        throw Error("unknown selector type '" + type + "'");
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

void save_bags_json(const std::string& path, const std::vector<BagSpec>& specs) {
  json out;
  out["bags"] = json::array();
  for (const auto& s : specs) {
    json b;
    b["name"] = s.name;
    switch (s.selector.kind) {
      case BagSelector::Kind::index_list:
        b["indices"] = s.selector.indices;
        break;
      case BagSelector::Kind::contains_token:
        b["selector"] = {{"type", "contains_token"}, {"token", s.selector.token}};
        break;
      case BagSelector::Kind::column_equals: {
        json sel = {{"type", "column_equals"},
                    {"column", s.selector.equals.at(0).first},
                    {"value", s.selector.equals.at(0).second}};
        if (s.selector.equals.size() > 1) {
          sel["and"] = json::array();
          for (std::size_t i = 1; i < s.selector.equals.size(); ++i)
            sel["and"].push_back({{"column", s.selector.equals[i].first},
                                  {"value", s.selector.equals[i].second}});
        }
        b["selector"] = std::move(sel);
        break;
      }
    }
    out["bags"].push_back(std::move(b));
  }
  std::ofstream os(path);
  os << out.dump(2) << '\n';
}

BagSet assemble_bags(const Dataset& data, const std::vector<BagSpec>& specs) {
  BagSet bags;
  for (const auto& spec : specs) {
    Bag bag;
    bag.name = spec.name;
    switch (spec.selector.kind) {
      case BagSelector::Kind::index_list:
        for (std::size_t i : spec.selector.indices) {
          if (i >= data.size())
            throw Error("bag '" + spec.name + "': index " + std::to_string(i) +
                        " out of range");
          bag.members.push_back(i);
        }
        break;
      case BagSelector::Kind::contains_token: {
        if (data.format != DataFormat::text_csv)
          throw Error("bag '" + spec.name + "': contains_token needs text data");
        for (std::size_t i = 0; i < data.docs.size(); ++i) {
          auto toks = tokenize(data.docs[i]);
          if (std::find(toks.begin(), toks.end(), spec.selector.token) != toks.end())
            bag.members.push_back(i);
        }
        break;
      }
      case BagSelector::Kind::column_equals: {
        if (data.format != DataFormat::tabular_csv)
          throw Error("bag '" + spec.name + "': column_equals needs tabular data");
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
          bool all = true;
          for (const auto& [col, val] : spec.selector.equals) {
            auto it = data.rows[i].find(col);
            if (it == data.rows[i].end())
              throw Error("bag '" + spec.name + "': unknown column '" + col + "'");
            if (it->second != val) {
              all = false;
              break;
            }
          }
          if (all) bag.members.push_back(i);
        }
        break;
      }
    }
    if (bag.members.empty())
      throw Error("bag '" + spec.name + "' selects no instances (empty bag)");
    bags.bags.push_back(std::move(bag));
  }
  return bags;
}

ConstraintSet load_constraints_json(const std::string& path, const BagSet& bags) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  json j = json::parse(in);
  ConstraintSet cons;
  auto resolve = [&](const std::string& name) {
    auto k = bags.find(name);
    if (!k) throw Error("constraints reference unknown bag '" + name + "'");
    return *k;
  };
  if (j.contains("bounds"))
    for (const auto& b : j.at("bounds")) {
      BoundConstraint bc;
      bc.bag = resolve(b.at("bag").get<std::string>());
      bc.lower = b.value("lower", 0.0);
      bc.upper = b.value("upper", 1.0);
      cons.bounds.push_back(bc);
    }
  if (j.contains("differences"))
    for (const auto& d : j.at("differences")) {
      DifferenceConstraint dc;
      dc.upper_bag = resolve(d.at("upper_bag").get<std::string>());
      dc.lower_bag = resolve(d.at("lower_bag").get<std::string>());
      dc.lower = d.value("lower", 0.0);
      dc.upper = d.value("upper", 1.0);
      cons.differences.push_back(dc);
    }
  if (j.contains("orderings"))
    for (const auto& o : j.at("orderings")) {
      if (!o.is_array() || o.size() != 2)
        throw Error("orderings entries must be [upper, lower] pairs");
      cons.extra_orderings.emplace_back(resolve(o[0].get<std::string>()),
                                        resolve(o[1].get<std::string>()));
    }
  return cons;
}

void save_constraints_json(const std::string& path, const ConstraintSet& cons,
                           const BagSet& bags) {
  json out;
  out["bounds"] = json::array();
  for (const auto& b : cons.bounds)
    out["bounds"].push_back({{"bag", bags[b.bag].name},
                             {"lower", b.lower},
                             {"upper", b.upper}});
  out["differences"] = json::array();
  for (const auto& d : cons.differences)
    out["differences"].push_back({{"upper_bag", bags[d.upper_bag].name},
                                  {"lower_bag", bags[d.lower_bag].name},
                                  {"lower", d.lower},
                                  {"upper", d.upper}});
  out["orderings"] = json::array();
  for (const auto& [a, b] : cons.extra_orderings)
    out["orderings"].push_back({bags[a].name, bags[b].name});
  std::ofstream os(path);
  os << out.dump(2) << '\n';
}

Featurizer fit_featurizer(const Dataset& data,
                          const std::vector<std::string>& feature_cols,
                          const std::vector<std::string>& removed_tokens,
                          std::size_t min_df) {
  Featurizer f;
  f.removed_tokens = removed_tokens;
  switch (data.format) {
    case DataFormat::text_csv: {
      f.kind = Featurizer::Kind::tfidf;
      std::vector<std::vector<std::string>> docs;
      docs.reserve(data.docs.size());
      std::unordered_set<std::string> removed(removed_tokens.begin(),
                                              removed_tokens.end());
      for (const auto& text : data.docs) {
        auto toks = tokenize(text);
        if (!removed.empty())
          std::erase_if(toks, [&](const std::string& t) { return removed.count(t) > 0; });
        docs.push_back(std::move(toks));
      }
      f.vocab = fit_vocabulary(docs, min_df);
      break;
    }
    case DataFormat::tabular_csv: {
      f.kind = Featurizer::Kind::tabular;
      if (feature_cols.empty())
        throw Error("tabular data needs --feature-cols");
      // a column is numeric when every value parses as a double
      std::vector<std::string> numeric, categorical;
      for (const auto& col : feature_cols) {
        bool is_num = true;
        for (const auto& row : data.rows) {
          auto it = row.find(col);
          if (it == row.end()) throw Error("unknown feature column '" + col + "'");
          try {
            std::size_t pos = 0;
            (void)std::stod(it->second, &pos);
            if (pos != it->second.size()) is_num = false;
          } catch (const std::exception&) {
            is_num = false;
          }
          if (!is_num) break;
        }
        (is_num ? numeric : categorical).push_back(col);
      }
      f.schema = fit_tabular(data.rows, numeric, categorical);
      break;
    }
    case DataFormat::svmlight:
      f.kind = Featurizer::Kind::identity;
      f.identity_dim = data.sparse.cols();
      break;
  }
  return f;
}

FeatureMatrix featurize(const Dataset& data, const Featurizer& feat) {
  switch (feat.kind) {
    case Featurizer::Kind::tfidf: {
      if (data.format != DataFormat::text_csv)
        throw Error("model expects text data");
      std::vector<std::vector<std::string>> docs;
      docs.reserve(data.docs.size());
      std::unordered_set<std::string> removed(feat.removed_tokens.begin(),
                                              feat.removed_tokens.end());
      for (const auto& text : data.docs) {
        auto toks = tokenize(text);
        if (!removed.empty())
          std::erase_if(toks, [&](const std::string& t) { return removed.count(t) > 0; });
        docs.push_back(std::move(toks));
      }
      return append_bias(tfidf_matrix(docs, feat.vocab));
    }
    case Featurizer::Kind::tabular:
      if (data.format != DataFormat::tabular_csv)
        throw Error("model expects tabular data");
      return append_bias(encode_tabular(data.rows, feat.schema));
    case Featurizer::Kind::identity: {
      if (data.format != DataFormat::svmlight)
        throw Error("model expects svmlight data");
      if (data.sparse.cols() > feat.identity_dim)
        throw Error("input has feature indices beyond the model dimension");
      FeatureMatrix padded(feat.identity_dim);
      for (std::size_t i = 0; i < data.sparse.rows(); ++i) {
        auto r = data.sparse.row(i);
        padded.add_row(r.idx, r.val);
      }
      return append_bias(padded);
    }
  }
  throw Error("unreachable");
}

namespace {

json vocab_to_json(const Vocabulary& v) {
  return json{{"tokens", v.tokens},
              {"df", v.df},
              {"idf", v.idf},
              {"n_docs", v.n_docs}};
}

Vocabulary vocab_from_json(const json& j) {
  Vocabulary v;
  v.tokens = j.at("tokens").get<std::vector<std::string>>();
  v.df = j.at("df").get<std::vector<std::uint32_t>>();
  v.idf = j.at("idf").get<std::vector<double>>();
  v.n_docs = j.at("n_docs").get<std::size_t>();
  for (std::uint32_t i = 0; i < v.tokens.size(); ++i) v.index.emplace(v.tokens[i], i);
  return v;
}

json schema_to_json(const TabularSchema& s) {
  json numeric = json::array();
  for (const auto& n : s.numeric)
    numeric.push_back({{"name", n.name}, {"mean", n.mean}, {"stddev", n.stddev}});
  json categorical = json::array();
  for (const auto& c : s.categorical)
    categorical.push_back({{"name", c.name}, {"categories", c.categories}});
  return json{{"numeric", numeric}, {"categorical", categorical}, {"dim", s.dim}};
}

TabularSchema schema_from_json(const json& j) {
  TabularSchema s;
  for (const auto& n : j.at("numeric"))
    s.numeric.push_back({n.at("name").get<std::string>(), n.at("mean").get<double>(),
                         n.at("stddev").get<double>()});
  for (const auto& c : j.at("categorical")) {
    TabularSchema::CategoricalColumn col;
    col.name = c.at("name").get<std::string>();
    col.categories = c.at("categories").get<std::vector<std::string>>();
    for (std::uint32_t i = 0; i < col.categories.size(); ++i)
      col.offset.emplace(col.categories[i], i);
    s.categorical.push_back(std::move(col));
  }
  s.dim = j.at("dim").get<std::size_t>();
  return s;
}

}  // namespace

void save_model_json(const std::string& path, const SavedModel& sm) {
  json out;
  out["weights"] = sm.model.weights;
  out["bias_index"] = sm.model.bias_index;
  json feat;
  switch (sm.feat.kind) {
    case Featurizer::Kind::tfidf:
      feat["type"] = "tfidf";
      feat["vocabulary"] = vocab_to_json(sm.feat.vocab);
      break;
    case Featurizer::Kind::tabular:
      feat["type"] = "tabular";
      feat["schema"] = schema_to_json(sm.feat.schema);
      break;
    case Featurizer::Kind::identity:
      feat["type"] = "identity";
      feat["dim"] = sm.feat.identity_dim;
      break;
  }
  if (!sm.feat.removed_tokens.empty())
    feat["removed_tokens"] = sm.feat.removed_tokens;
  out["featurizer"] = std::move(feat);
  out["hyperparams"] = {{"C", sm.hp.C},
                        {"C_L", sm.hp.C_L},
                        {"max_outer_iters", sm.hp.max_outer_iters},
                        {"rel_tol", sm.hp.rel_tol},
                        {"lp_feas_tol", sm.hp.lp_feas_tol},
                        {"svm_tol", sm.hp.svm_tol},
                        {"descent_mode",
                         sm.hp.descent_mode == DescentMode::sign ? "sign" : "exact"}};
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << out.dump(2) << '\n';
}

SavedModel load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  json j = json::parse(in);
  SavedModel sm;
  sm.model.weights = j.at("weights").get<std::vector<double>>();
  sm.model.bias_index = j.at("bias_index").get<std::size_t>();
  sm.model.has_bias = true;
  const auto& feat = j.at("featurizer");
  std::string type = feat.at("type").get<std::string>();
  if (type == "tfidf") {
    sm.feat.kind = Featurizer::Kind::tfidf;
    sm.feat.vocab = vocab_from_json(feat.at("vocabulary"));
  } else if (type == "tabular") {
    sm.feat.kind = Featurizer::Kind::tabular;
    sm.feat.schema = schema_from_json(feat.at("schema"));
  } else if (type == "identity") {
    sm.feat.kind = Featurizer::Kind::identity;
    sm.feat.identity_dim = feat.at("dim").get<std::size_t>();
  } else {
    throw Error("unknown featurizer type '" + type + "'");
  }
  if (feat.contains("removed_tokens"))
    sm.feat.removed_tokens = feat.at("removed_tokens").get<std::vector<std::string>>();
  const auto& hp = j.at("hyperparams");
  sm.hp.C = hp.at("C").get<double>();
  sm.hp.C_L = hp.at("C_L").get<double>();
  sm.hp.max_outer_iters = hp.at("max_outer_iters").get<int>();
  sm.hp.rel_tol = hp.at("rel_tol").get<double>();
  sm.hp.lp_feas_tol = hp.at("lp_feas_tol").get<double>();
  sm.hp.svm_tol = hp.at("svm_tol").get<double>();
  sm.hp.descent_mode = hp.at("descent_mode").get<std::string>() == "exact"
                           ? DescentMode::exact
                           : DescentMode::sign;
  return sm;
}

void save_preds_csv(const std::string& path, const std::vector<std::string>& ids,
                    const std::vector<double>& margins) {
  if (ids.size() != margins.size()) throw Error("save_preds_csv: length mismatch");
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << "id,margin,label\n";
  char buf[64];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", margins[i]);
    os << ids[i] << ',' << buf << ',' << sign_or_positive(margins[i]) << '\n';
  }
}

PredsFile load_preds_csv(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 3 || rows[0][0] != "id")
    throw Error(path + ": expected header id,margin,label");
  PredsFile out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (rows[r].size() != 3)
      throw Error(path + ":" + std::to_string(r + 1) + ": expected 3 fields");
    out.ids.push_back(rows[r][0]);
    out.margins.push_back(std::stod(rows[r][1]));
    out.labels.push_back(parse_pm_label(rows[r][2], path));
  }
  return out;
}

void save_trace_json(const std::string& path, const TrainTrace& trace,
                     const BagSet& bags) {
  json out;
  switch (trace.status) {
    case FitStatus::converged: out["status"] = "converged"; break;
    case FitStatus::max_iters: out["status"] = "max_iters"; break;
    case FitStatus::infeasible: out["status"] = "infeasible"; break;
  }
  out["iterations"] = trace.iterations.size();
  json bags_out = json::array();
  for (std::size_t k : trace.p_hat_bags) bags_out.push_back(bags[k].name);
  out["p_hat_bags"] = std::move(bags_out);
  std::vector<double> obj_y, obj_w, relw, sat, viol;
  std::vector<std::vector<double>> p_hat;
  for (const auto& it : trace.iterations) {
    obj_y.push_back(it.objective_after_y);
    obj_w.push_back(it.objective_after_w);
    relw.push_back(it.rel_weight_change);
    sat.push_back(it.frac_saturated);
    viol.push_back(it.lp_total_violation);
    p_hat.push_back(it.p_hat);
  }
  out["objective_after_y"] = obj_y;
  out["objective_after_w"] = obj_w;
  out["rel_weight_change"] = relw;
  out["frac_saturated"] = sat;
  out["lp_total_violation"] = viol;
  out["p_hat"] = p_hat;
  if (!trace.certificate.empty()) out["certificate"] = trace.certificate;
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << out.dump(2) << '\n';
}

void save_grid_json(const std::string& path, const GridResult& grid) {
  json out;
  out["grid"] = grid.grid;
  out["mean_violation"] = grid.mean_violation;
  out["selected_C"] = grid.selected_C;
  out["dropped_cells"] = grid.dropped_cells;
  json cells = json::array();
  for (const auto& per_c : grid.cell_scores) {
    json row = json::array();
    for (const auto& s : per_c)
      row.push_back(s ? json(*s) : json(nullptr));
    cells.push_back(std::move(row));
  }
  out["cell_scores"] = std::move(cells);
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << out.dump(2) << '\n';
}

TopFeatures report_top_features(const Model& model, const Vocabulary& vocab,
                                std::size_t k) {
  if (vocab.size() == 0) throw Error("report_top_features: empty vocabulary");
  std::vector<std::size_t> order(vocab.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // bias sits past the vocabulary columns, so it is excluded by construction
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (model.weights[a] != model.weights[b])
      return model.weights[a] > model.weights[b];
    return a < b;
  });
  TopFeatures out;
  std::size_t kk = std::min(k, order.size());
  for (std::size_t i = 0; i < kk; ++i)
    out.positive.emplace_back(vocab.tokens[order[i]], model.weights[order[i]]);
  for (std::size_t i = 0; i < kk; ++i) {
    std::size_t j = order[order.size() - 1 - i];
    out.negative.emplace_back(vocab.tokens[j], model.weights[j]);
  }
  return out;
}

std::unordered_map<std::string, int> load_labels_csv(const std::string& path) {
  auto rows = read_csv(path);
  std::unordered_map<std::string, int> out;
  std::size_t start = 0;
  if (!rows.empty() && rows[0].size() == 2 && rows[0][0] == "id") start = 1;
  for (std::size_t r = start; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (rows[r].size() != 2)
      throw Error(path + ":" + std::to_string(r + 1) + ": expected id,label");
    out[rows[r][0]] = parse_pm_label(rows[r][1], path + ":" + std::to_string(r + 1));
  }
  return out;
}

void save_labels_csv(const std::string& path,
                     const std::vector<std::string>& ids,
                     const std::vector<int>& labels) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    os << ids[i] << ',' << labels[i] << '\n';
}

}  // namespace ballpark
