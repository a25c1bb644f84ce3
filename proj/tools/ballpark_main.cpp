#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "ballpark/alternator.hpp"
#include "ballpark/dataio.hpp"
#include "ballpark/expharness.hpp"
#include "ballpark/tuner.hpp"

using namespace ballpark;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> parse_grid(const std::string& s) {
  if (s.empty() || s == "default") return default_C_grid();
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(std::stod(tok));
  return out;
}

// Data + bags + constraints + featurization, with labeled svmlight rows
// reordered behind the unlabeled ones (bags and outputs keep file order).
struct Pipeline {
  Dataset data;
  std::vector<BagSpec> specs;
  BagSet bags;
  ConstraintSet cons;
  Featurizer feat;
  FeatureMatrix features;
  LabeledSet labeled;
  std::vector<std::size_t> to_file;  // internal row -> file row
};

struct CommonFlags {
  std::string data_path, format = "text-csv", bags_path, constraints_path;
  std::string feature_cols, id_col, label_col, positive_label;
  bool remove_bag_words = false;
  std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, CommonFlags& f, bool need_bags) {
  cmd->add_option("--data", f.data_path, "input dataset")->required();
  cmd->add_option("--format", f.format, "text-csv | tabular-csv | svmlight");
  auto* bags_opt = cmd->add_option("--bags", f.bags_path, "bags.json");
  if (need_bags) bags_opt->required();
  cmd->add_option("--feature-cols", f.feature_cols,
                  "tabular: comma-separated feature columns");
  cmd->add_option("--id-col", f.id_col, "tabular: id column");
  cmd->add_option("--label-col", f.label_col, "tabular: ground-truth column");
  cmd->add_option("--positive-label", f.positive_label,
                  "tabular: value mapped to +1");
  cmd->add_flag("--remove-bag-words", f.remove_bag_words,
                "drop bag-defining tokens from documents before featurizing");
}

Pipeline build_pipeline(const CommonFlags& f, bool with_constraints) {
  Pipeline p;
  LoadOptions lo;
  lo.id_col = f.id_col;
  lo.label_col = f.label_col;
  lo.positive_label = f.positive_label;
  p.data = load_dataset(f.data_path, parse_format(f.format), lo);

  if (!f.bags_path.empty()) {
    p.specs = load_bags_json(f.bags_path);
    p.bags = assemble_bags(p.data, p.specs);
  }
  if (with_constraints) {
    if (f.constraints_path.empty()) throw Error("--constraints is required");
    p.cons = load_constraints_json(f.constraints_path, p.bags);
  }

  std::vector<std::string> removed;
  if (f.remove_bag_words)
    for (const auto& spec : p.specs)
      if (spec.selector.kind == BagSelector::Kind::contains_token)
        removed.push_back(spec.selector.token);

  p.feat = fit_featurizer(p.data, split_list(f.feature_cols), removed);
  FeatureMatrix file_order = featurize(p.data, p.feat);

  // unlabeled rows first; svmlight labels make X_L
  std::vector<std::size_t> order;
  std::vector<std::size_t> labeled_rows;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    bool is_labeled = p.data.format == DataFormat::svmlight &&
                      p.data.svm_labels[i] != 0;
    if (is_labeled)
      labeled_rows.push_back(i);
    else
      order.push_back(i);
  }
  const std::size_t n_unlabeled = order.size();
  order.insert(order.end(), labeled_rows.begin(), labeled_rows.end());
  p.to_file = order;
  std::vector<std::size_t> to_internal(p.data.size());
  for (std::size_t s = 0; s < order.size(); ++s) to_internal[order[s]] = s;

  p.features = file_order.select_rows(order);
  for (std::size_t s = n_unlabeled; s < order.size(); ++s)
    p.labeled.entries.emplace_back(s, p.data.svm_labels[order[s]]);
  for (auto& bag : p.bags.bags)
    for (auto& m : bag.members) m = to_internal[m];
  return p;
}

Hyperparams hp_from_flags(double C, double C_L, int max_iters, double rel_tol,
                          double lp_feas_tol, double svm_tol,
                          const std::string& mode) {
  Hyperparams hp;
  hp.C = C;
  hp.C_L = C_L;
  hp.max_outer_iters = max_iters;
  hp.rel_tol = rel_tol;
  hp.lp_feas_tol = lp_feas_tol;
  hp.svm_tol = svm_tol;
  if (mode == "sign")
    hp.descent_mode = DescentMode::sign;
  else if (mode == "exact")
    hp.descent_mode = DescentMode::exact;
  else
    throw Error("--mode must be sign or exact");
  return hp;
}

int run_train(const CommonFlags& f, const Hyperparams& hp, bool soft,
              double rho, const std::string& out,
              const std::string& trace_path) {
  Pipeline p = build_pipeline(f, true);
  auto errs = validate(p.bags, p.cons, p.features.rows() - p.labeled.size(),
                       p.labeled.size());
  if (!errs.empty()) {
    for (const auto& e : errs) std::cerr << "invalid input: " << e << '\n';
    return kExitError;
  }
  FitOptions fo;
  fo.seed = f.seed;
  fo.soft = soft;
  fo.rho = rho;
  FitResult fit = fit_ballpark(p.features, p.bags, p.cons, p.labeled, hp, fo);
  if (!trace_path.empty()) save_trace_json(trace_path, fit.trace, p.bags);
  if (fit.trace.status == FitStatus::infeasible) {
    std::cerr << "constraints are infeasible; minimal conflicting subset:\n";
    for (const auto& c : fit.trace.certificate) std::cerr << "  " << c << '\n';
    return kExitInfeasible;
  }
  save_model_json(out, {fit.model, p.feat, hp});
  std::cout << "trained: " << fit.trace.iterations.size() << " iterations, "
            << (fit.trace.status == FitStatus::converged ? "converged"
                                                         : "max_iters")
            << ", model -> " << out << '\n';
  return kExitOk;
}

int run_predict(const std::string& model_path, const CommonFlags& f,
                const std::string& out) {
  SavedModel sm = load_model_json(model_path);
  LoadOptions lo;
  lo.id_col = f.id_col;
  lo.label_col = f.label_col;
  lo.positive_label = f.positive_label;
  Dataset data = load_dataset(f.data_path, parse_format(f.format), lo);
  FeatureMatrix feats = featurize(data, sm.feat);
  auto margins = decision_values(sm.model, feats);
  save_preds_csv(out, data.ids, margins);
  std::cout << "wrote " << margins.size() << " predictions -> " << out << '\n';
  return kExitOk;
}

int run_eval(const std::string& preds_path, const std::string& labels_path,
             const CommonFlags& f) {
  PredsFile preds = load_preds_csv(preds_path);
  std::unordered_map<std::string, int> truth;
  if (!labels_path.empty()) {
    truth = load_labels_csv(labels_path);
  } else {
    LoadOptions lo;
    lo.id_col = f.id_col;
    lo.label_col = f.label_col;
    lo.positive_label = f.positive_label;
    Dataset data = load_dataset(f.data_path, parse_format(f.format), lo);
    if (!data.has_truth) throw Error("dataset has no ground-truth labels");
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data.truth[i] != 0) truth.emplace(data.ids[i], data.truth[i]);
  }
  std::vector<int> yhat, ytrue;
  for (std::size_t i = 0; i < preds.ids.size(); ++i) {
    auto it = truth.find(preds.ids[i]);
    if (it == truth.end()) continue;
    yhat.push_back(preds.labels[i]);
    ytrue.push_back(it->second);
  }
  if (yhat.empty()) throw Error("no predictions matched the labels");
  std::printf("accuracy %.6f\n", accuracy(yhat, ytrue));
  std::printf("macro_f1 %.6f\n", macro_f1(yhat, ytrue));
  return kExitOk;
}

int run_tune(const CommonFlags& f, const Hyperparams& hp, bool soft, double rho,
             const std::string& grid_spec, std::size_t folds,
             const std::string& out) {
  Pipeline p = build_pipeline(f, true);
  TunerInputs in;
  in.features = &p.features;
  in.bags = &p.bags;
  in.cons = &p.cons;
  in.labeled = &p.labeled;
  in.hp = hp;
  in.fit.soft = soft;
  in.fit.rho = rho;
  CvPlan plan = split_bags(p.bags, folds, f.seed);
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << '\n';
  GridResult res;
  try {
    res = select_C(parse_grid(grid_spec), in, plan);
  } catch (const Error& e) {
    if (std::string(e.what()).find("infeasible") != std::string::npos) {
      std::cerr << e.what() << '\n';
      return kExitInfeasible;
    }
    throw;
  }
  if (!out.empty()) save_grid_json(out, res);
  std::printf("selected C = %g (mean violation %.6f, %zu dropped cells)\n",
              res.selected_C, res.mean_violation[res.selected_index],
              res.dropped_cells);
  return kExitOk;
}

int run_baseline(const CommonFlags& f, const std::string& high,
                 const std::string& low, const std::string& grid_spec,
                 std::size_t folds, double svm_tol, const std::string& out) {
  Pipeline p = build_pipeline(f, false);
  auto resolve = [&](const std::string& name) {
    auto k = p.bags.find(name);
    if (!k) throw Error("unknown bag '" + name + "'");
    return *k;
  };
  std::vector<std::size_t> high_k, low_k;
  for (const auto& n : split_list(high)) high_k.push_back(resolve(n));
  for (const auto& n : split_list(low)) low_k.push_back(resolve(n));
  auto res = high_vs_low(p.features, p.bags, high_k, low_k,
                         parse_grid(grid_spec), folds, f.seed, svm_tol);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  Hyperparams hp;
  hp.C = res.selected_C;
  save_model_json(out, {res.model, p.feat, hp});
  std::printf("baseline trained with C = %g, model -> %s\n", res.selected_C,
              out.c_str());
  return kExitOk;
}

int run_synth(const std::string& sizes, const std::string& props,
              std::size_t n_features, std::size_t n_informative,
              double class_sep, double u_m, double l_p, double l_d,
              std::uint64_t seed, const std::string& out_dir) {
  SyntheticConfig cfg;
  for (const auto& s : split_list(sizes)) cfg.bag_sizes.push_back(std::stoul(s));
  for (const auto& s : split_list(props)) cfg.proportions.push_back(std::stod(s));
  cfg.n_features = n_features;
  cfg.n_informative = n_informative;
  cfg.class_sep = class_sep;
  cfg.seed = seed;
  auto data = make_synthetic_bags(cfg);

  std::string feats_path = out_dir + "/features.svmlight";
  std::ofstream os(feats_path);
  if (!os) throw Error("cannot write '" + feats_path + "'");
  char buf[64];
  for (std::size_t i = 0; i < data.features.rows(); ++i) {
    os << '?';
    auto r = data.features.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.val[k]);
      os << ' ' << r.idx[k] << ':' << buf;
    }
    os << '\n';
  }
  os.close();

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    ids.push_back(std::to_string(i));
  save_labels_csv(out_dir + "/labels.csv", ids, data.labels);

  std::vector<BagSpec> specs;
  std::vector<double> realized;
  for (const auto& bag : data.bags) {
    BagSpec spec;
    spec.name = bag.name;
    spec.selector.kind = BagSelector::Kind::index_list;
    spec.selector.indices = bag.members;
    specs.push_back(std::move(spec));
    realized.push_back(bag_proportion(data.labels, bag));
  }
  save_bags_json(out_dir + "/bags.json", specs);
  save_constraints_json(out_dir + "/constraints.json",
                        factor_constraints(realized, u_m, l_p, l_d), data.bags);
  std::printf("synthetic dataset -> %s (features.svmlight, labels.csv, "
              "bags.json, constraints.json)\n",
              out_dir.c_str());
  return kExitOk;
}

int run_scan(const CommonFlags& f, const std::string& labels_path,
             const std::string& eval_data, const std::string& eval_labels,
             const std::string& factor, const std::string& values,
             double u_m, double l_p, double l_d, const Hyperparams& hp,
             const std::string& out) {
  Pipeline p = build_pipeline(f, false);
  auto truth_map = load_labels_csv(labels_path);
  // truth in internal order
  std::vector<int> internal_truth(p.data.size(), 0);
  for (std::size_t s = 0; s < p.to_file.size(); ++s) {
    auto it = truth_map.find(p.data.ids[p.to_file[s]]);
    if (it == truth_map.end())
      throw Error("missing label for id '" + p.data.ids[p.to_file[s]] + "'");
    internal_truth[s] = it->second;
  }
  std::vector<double> true_p;
  for (const auto& bag : p.bags) true_p.push_back(bag_proportion(internal_truth, bag));

  LoadOptions lo;
  Dataset eval_ds = load_dataset(eval_data, parse_format(f.format), lo);
  FeatureMatrix eval_feats = featurize(eval_ds, p.feat);
  auto eval_map = load_labels_csv(eval_labels);
  std::vector<int> ev;
  for (std::size_t i = 0; i < eval_ds.size(); ++i) {
    auto it = eval_map.find(eval_ds.ids[i]);
    if (it == eval_map.end())
      throw Error("missing eval label for id '" + eval_ds.ids[i] + "'");
    ev.push_back(it->second);
  }

  SensitivityInputs in;
  in.train_features = &p.features;
  in.bags = &p.bags;
  in.true_p = true_p;
  in.eval_features = &eval_feats;
  in.eval_labels = ev;
  in.hp = hp;
  in.seed = f.seed;
  in.u_m = u_m;
  in.l_p = l_p;
  in.l_d = l_d;

  std::vector<double> vals;
  for (const auto& v : split_list(values)) vals.push_back(std::stod(v));
  auto rows = sensitivity_scan(in, factor, vals);
  std::string csv = sensitivity_csv(rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(out);
    os << csv;
    std::cout << "scan -> " << out << '\n';
  }
  return kExitOk;
}

int run_report(const std::string& model_path, std::size_t top_k) {
  SavedModel sm = load_model_json(model_path);
  if (sm.feat.kind != Featurizer::Kind::tfidf)
    throw Error("report needs a text (tfidf) model");
  auto top = report_top_features(sm.model, sm.feat.vocab, top_k);
  std::printf("top positive terms:\n");
  for (const auto& [tok, w] : top.positive) std::printf("  %-24s %+.6f\n", tok.c_str(), w);
  std::printf("top negative terms:\n");
  for (const auto& [tok, w] : top.negative) std::printf("  %-24s %+.6f\n", tok.c_str(), w);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ballpark: instance labels from rough bag-proportion constraints"};
  app.require_subcommand(1);

  CommonFlags f;
  double C = 1.0, C_L = 0.0, rel_tol = 1e-5, lp_feas_tol = 1e-8, svm_tol = 1e-4;
  int max_iters = 200;
  std::string mode = "sign";
  double soft_rho = 0.0;
  std::string out = "model.json", trace_path, grid_spec, labels_path, preds_path;
  std::string model_path = "model.json";
  std::size_t folds = 10, top_k = 20;

  auto add_hp_flags = [&](CLI::App* cmd) {
    cmd->add_option("--C", C, "unlabeled cost");
    cmd->add_option("--C-L", C_L, "labeled cost");
    cmd->add_option("--max-iters", max_iters, "outer iteration cap");
    cmd->add_option("--rel-tol", rel_tol, "weight-change stopping tolerance");
    cmd->add_option("--lp-feas-tol", lp_feas_tol, "LP feasibility tolerance");
    cmd->add_option("--svm-tol", svm_tol, "SVM duality-gap tolerance");
    cmd->add_option("--mode", mode, "sign | exact");
    cmd->add_option("--soft", soft_rho, "soften constraints with weight RHO");
  };
  auto require_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", f.seed, "random seed (required)")->required();
  };

  auto* train = app.add_subcommand("train", "fit the alternating optimizer");
  add_data_flags(train, f, true);
  train->add_option("--constraints", f.constraints_path, "constraints.json")->required();
  add_hp_flags(train);
  require_seed(train);
  train->add_option("--out", out, "model output path");
  train->add_option("--trace", trace_path, "diagnostics trace output path");

  auto* predict = app.add_subcommand("predict", "score a dataset with a model");
  add_data_flags(predict, f, false);
  predict->add_option("--model", model_path, "model.json")->required();
  predict->add_option("--out", out, "preds.csv output path")->required();

  auto* eval = app.add_subcommand("eval", "accuracy and macro-F1 of predictions");
  eval->add_option("--preds", preds_path, "preds.csv")->required();
  eval->add_option("--labels", labels_path, "labels.csv (id,label)");
  eval->add_option("--data", f.data_path, "dataset with ground-truth labels");
  eval->add_option("--format", f.format, "dataset format");
  eval->add_option("--id-col", f.id_col, "tabular id column");
  eval->add_option("--label-col", f.label_col, "tabular label column");
  eval->add_option("--positive-label", f.positive_label, "value mapped to +1");

  auto* tune = app.add_subcommand("tune", "select C by constraint-violation CV");
  add_data_flags(tune, f, true);
  tune->add_option("--constraints", f.constraints_path, "constraints.json")->required();
  add_hp_flags(tune);
  require_seed(tune);
  tune->add_option("--grid", grid_spec, "comma-separated C grid (default 1e-4..1e4)");
  tune->add_option("--folds", folds, "CV folds");
  tune->add_option("--out", out, "grid result JSON path");

  std::string high, low;
  auto* baseline = app.add_subcommand("baseline", "high-vs-low weighted SVM");
  add_data_flags(baseline, f, true);
  require_seed(baseline);
  baseline->add_option("--high", high, "comma-separated high bag names")->required();
  baseline->add_option("--low", low, "comma-separated low bag names")->required();
  baseline->add_option("--grid", grid_spec, "C grid");
  baseline->add_option("--folds", folds, "CV folds");
  baseline->add_option("--svm-tol", svm_tol, "SVM tolerance");
  baseline->add_option("--out", out, "model output path");

  std::string sizes = "500,500,500", props = "0.4,0.3,0.2", out_dir = ".";
  std::size_t n_features = 20, n_informative = 1;
  double class_sep = 1.0, u_m = 1.0, l_p = 0.5, l_d = 1.0;
  auto* synth = app.add_subcommand("synth", "generate a synthetic bagged dataset");
  synth->add_option("--sizes", sizes, "bag sizes");
  synth->add_option("--props", props, "bag positive proportions");
  synth->add_option("--n-features", n_features, "feature count");
  synth->add_option("--n-informative", n_informative, "informative feature count");
  synth->add_option("--class-sep", class_sep, "cluster separation");
  synth->add_option("--u-m", u_m, "upper-bound factor on the top bag");
  synth->add_option("--l-p", l_p, "lower-bound factor");
  synth->add_option("--l-d", l_d, "difference lower-bound factor");
  synth->add_option("--seed", f.seed, "random seed (required)")->required();
  synth->add_option("--out-dir", out_dir, "output directory");

  std::string eval_data, eval_labels, factor = "ld", values;
  auto* scan = app.add_subcommand("scan", "constraint-tightness sensitivity scan");
  add_data_flags(scan, f, true);
  require_seed(scan);
  scan->add_option("--labels", labels_path, "training ground-truth labels.csv")->required();
  scan->add_option("--eval-data", eval_data, "validation dataset")->required();
  scan->add_option("--eval-labels", eval_labels, "validation labels.csv")->required();
  scan->add_option("--factor", factor, "um | lp | ld");
  scan->add_option("--values", values, "comma-separated factor values")->required();
  scan->add_option("--u-m", u_m, "fixed u_m while another factor varies");
  scan->add_option("--l-p", l_p, "fixed l_p");
  scan->add_option("--l-d", l_d, "fixed l_d");
  add_hp_flags(scan);
  scan->add_option("--out", out, "CSV output path")->default_val("");

  auto* report = app.add_subcommand("report", "top positive/negative terms");
  report->add_option("--model", model_path, "model.json")->required();
  report->add_option("--top-k", top_k, "list length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return run_train(f, hp_from_flags(C, C_L, max_iters, rel_tol, lp_feas_tol,
                                        svm_tol, mode),
                       soft_rho > 0.0, soft_rho, out, trace_path);
    if (predict->parsed()) return run_predict(model_path, f, out);
    if (eval->parsed()) return run_eval(preds_path, labels_path, f);
    if (tune->parsed())
      return run_tune(f, hp_from_flags(C, C_L, max_iters, rel_tol, lp_feas_tol,
                                       svm_tol, mode),
                      soft_rho > 0.0, soft_rho, grid_spec, folds, out);
    if (baseline->parsed())
      return run_baseline(f, high, low, grid_spec, folds, svm_tol, out);
    if (synth->parsed())
      return run_synth(sizes, props, n_features, n_informative, class_sep, u_m,
                       l_p, l_d, f.seed, out_dir);
    if (scan->parsed())
      return run_scan(f, labels_path, eval_data, eval_labels, factor, values,
                      u_m, l_p, l_d,
                      hp_from_flags(C, C_L, max_iters, rel_tol, lp_feas_tol,
                                    svm_tol, mode),
                      out);
    if (report->parsed()) return run_report(model_path, top_k);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
