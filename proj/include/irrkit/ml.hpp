#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace irrkit::ml {

// Dense row-major design matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values);
  Matrix select_rows(std::span<const std::size_t> rows) const;
  Matrix select_cols(std::span<const std::size_t> cols) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Labels are 0/1 throughout.
using Labels = std::vector<int>;

void check_training_set(const Matrix& x, std::span<const int> y, std::size_t min_per_class);

// Stratified k-fold assignment, seeded. Returns the fold index per example.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

// --- Boosted regression stumps (Gentle AdaBoost) ---------------------------

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;  // x[feature] <= threshold goes left
  double left = 0.0;
  double right = 0.0;

  double operator()(std::span<const double> x) const {
    return x[feature] <= threshold ? left : right;
  }
};

struct StumpEnsemble {
  std::vector<Stump> stumps;

  double margin(std::span<const double> x) const;
  // 1 / (1 + exp(-2 margin))
  double predict_proba(std::span<const double> x) const;
};

StumpEnsemble train_boosted_stumps(const Matrix& x, std::span<const int> y, int rounds);

// --- L2-regularised logistic regression ------------------------------------

struct LogisticModel {
  std::vector<double> center;
  std::vector<double> scale;
  std::vector<double> weights;
  double intercept = 0.0;

  double predict_proba(std::span<const double> x) const;
};

struct LogisticOptions {
  double l2 = 1e-4;
  double tolerance = 1e-9;
  int max_iter = 200;
};

LogisticModel train_logistic(const Matrix& x, std::span<const int> y,
                             const LogisticOptions& options = {});

// --- CART ------------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // positive fraction at the node
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict_proba(std::span<const double> x) const;
};

struct TreeOptions {
  int max_depth = 5;             // <= 0 means unlimited
  std::size_t min_samples_leaf = 2;
  std::size_t max_features = 0;  // 0 means all features
};

// `samples` may contain repeats (bootstrap). `seed` drives the per-node
// feature sampling when max_features restricts the candidate set.
DecisionTree train_tree(const Matrix& x, std::span<const int> y,
                        std::span<const std::size_t> samples, const TreeOptions& options,
                        std::uint64_t seed);

DecisionTree train_tree(const Matrix& x, std::span<const int> y, const TreeOptions& options);

struct ForestOptions {
  int trees = 100;
  int max_depth = 0;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 means floor(sqrt(cols))
  std::uint64_t seed = 1;
};

struct RandomForest {
  std::vector<DecisionTree> trees;

  double predict_proba(std::span<const double> x) const;
};

// Bagged CART with Gini splits and sqrt(d) feature sampling per node.
RandomForest train_random_forest(const Matrix& x, std::span<const int> y,
                                 const ForestOptions& options);

// --- Gaussian naive Bayes --------------------------------------------------

struct GaussianNaiveBayes {
  double prior_positive = 0.5;
  std::vector<double> mean[2];
  std::vector<double> variance[2];

  double predict_proba(std::span<const double> x) const;
};

GaussianNaiveBayes train_naive_bayes(const Matrix& x, std::span<const int> y);

// --- JSON persistence ------------------------------------------------------

nlohmann::json to_json(const StumpEnsemble& m);
nlohmann::json to_json(const LogisticModel& m);
nlohmann::json to_json(const DecisionTree& m);
StumpEnsemble stumps_from_json(const nlohmann::json& j);
LogisticModel logistic_from_json(const nlohmann::json& j);
DecisionTree tree_from_json(const nlohmann::json& j);

}  // namespace irrkit::ml
