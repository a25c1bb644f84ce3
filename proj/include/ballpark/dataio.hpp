#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ballpark/featurize.hpp"
#include "ballpark/svm.hpp"
#include "ballpark/tuner.hpp"
#include "ballpark/types.hpp"

namespace ballpark {

enum class DataFormat { text_csv, tabular_csv, svmlight };

DataFormat parse_format(const std::string& s);

struct LoadOptions {
  std::string id_col;        // tabular: defaults to the row number
  std::string label_col;     // tabular: ground-truth column (eval only)
  std::string positive_label;  // tabular: label value mapped to +1
};

// Instances in file order. Ground-truth labels, when present, are only ever
// consumed by evaluation paths. svmlight rows with an explicit +-1 label form
// the labeled set X_L; '?' rows are the unlabeled X_N.
struct Dataset {
  DataFormat format = DataFormat::text_csv;
  std::vector<std::string> ids;
  // text
  std::vector<std::string> docs;
  // tabular
  std::vector<std::string> header;
  std::vector<std::unordered_map<std::string, std::string>> rows;
  // svmlight
  FeatureMatrix sparse;
  std::vector<int> svm_labels;  // 0 = unlabeled
  // ground truth (0 = missing)
  std::vector<int> truth;
  bool has_truth = false;

  std::size_t size() const { return ids.size(); }
};

Dataset load_dataset(const std::string& path, DataFormat format,
                     const LoadOptions& opt = {});

// simple CSV reader (quoted fields, embedded commas/newlines)
std::vector<std::vector<std::string>> read_csv(const std::string& path);

struct BagSelector {
  enum class Kind { contains_token, column_equals, index_list };
  Kind kind = Kind::index_list;
  std::string token;
  std::vector<std::pair<std::string, std::string>> equals;  // conjunction
  std::vector<std::size_t> indices;
};

struct BagSpec {
  std::string name;
  BagSelector selector;
};

std::vector<BagSpec> load_bags_json(const std::string& path);
BagSet assemble_bags(const Dataset& data, const std::vector<BagSpec>& specs);

ConstraintSet load_constraints_json(const std::string& path, const BagSet& bags);
void save_constraints_json(const std::string& path, const ConstraintSet& cons,
                           const BagSet& bags);
void save_bags_json(const std::string& path, const std::vector<BagSpec>& specs);

// featurizer metadata embedded in model.json
struct Featurizer {
  enum class Kind { tfidf, tabular, identity };
  Kind kind = Kind::identity;
  Vocabulary vocab;
  TabularSchema schema;
  std::size_t identity_dim = 0;            // svmlight feature count before bias
  std::vector<std::string> removed_tokens;  // --remove-bag-words
};

Featurizer fit_featurizer(const Dataset& data,
                          const std::vector<std::string>& feature_cols,
                          const std::vector<std::string>& removed_tokens,
                          std::size_t min_df = 1);

// transform + bias append; usable for both fit-time and predict-time data
FeatureMatrix featurize(const Dataset& data, const Featurizer& feat);

struct SavedModel {
  Model model;
  Featurizer feat;
  Hyperparams hp;
};

void save_model_json(const std::string& path, const SavedModel& sm);
SavedModel load_model_json(const std::string& path);

void save_preds_csv(const std::string& path, const std::vector<std::string>& ids,
                    const std::vector<double>& margins);
// returns (ids, margins, labels)
struct PredsFile {
  std::vector<std::string> ids;
  std::vector<double> margins;
  std::vector<int> labels;
};
PredsFile load_preds_csv(const std::string& path);

void save_trace_json(const std::string& path, const TrainTrace& trace,
                     const BagSet& bags);
void save_grid_json(const std::string& path, const GridResult& grid);

// top-k positive and negative feature weights (bias excluded)
struct TopFeatures {
  std::vector<std::pair<std::string, double>> positive;
  std::vector<std::pair<std::string, double>> negative;
};
TopFeatures report_top_features(const Model& model, const Vocabulary& vocab,
                                std::size_t k);

// labels csv: id,label with label in {-1,+1}
std::unordered_map<std::string, int> load_labels_csv(const std::string& path);
void save_labels_csv(const std::string& path,
                     const std::vector<std::string>& ids,
                     const std::vector<int>& labels);

}  // namespace ballpark
