#include "irrkit/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "irrkit/error.hpp"

namespace irrkit::ml {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::InvalidArgument, "Matrix::append_row: width mismatch");
  }
  values_.insert(values_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = (*this)(r, cols[c]);
  }
  return out;
}

void check_training_set(const Matrix& x, std::span<const int> y, std::size_t min_per_class) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "training set: row/label count mismatch");
  }
  std::size_t pos = 0;
  for (int label : y) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::InvalidArgument, "training set: labels must be 0 or 1");
    }
    pos += static_cast<std::size_t>(label);
  }
  const std::size_t neg = y.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::InvalidArgument, "training set contains a single class");
  }
  if (pos < min_per_class || neg < min_per_class) {
    throw Error(ErrorCode::InvalidArgument,
                "training set needs at least " + std::to_string(min_per_class) +
                    " examples per class");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument,
                    "training set: non-finite feature in row " + std::to_string(r));
      }
    }
  }
}

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "fold count must be at least 2");
  if (y.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::InvalidArgument, "fewer examples than folds");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> fold(y.size(), 0);
  // Deal each class round-robin after shuffling; the negative class continues
  // where the positive class stopped so fold sizes stay balanced.
  int next = 0;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      fold[i] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

// ---------------------------------------------------------------------------

double StumpEnsemble::margin(std::span<const double> x) const {
  double f = 0.0;
  for (const auto& s : stumps) f += s(x);
  return f;
}

double StumpEnsemble::predict_proba(std::span<const double> x) const {
  return 1.0 / (1.0 + std::exp(-2.0 * margin(x)));
}

namespace {

// Weighted least-squares stump over all features. Targets are +-1.
Stump fit_stump(const Matrix& x, std::span<const double> target, std::span<const double> w,
                const std::vector<std::vector<std::size_t>>& sorted) {
  double total_w = 0.0, total_wy = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    total_w += w[i];
    total_wy += w[i] * target[i];
  }
  Stump best;
  best.feature = 0;
  best.threshold = std::numeric_limits<double>::infinity();
  best.left = best.right = total_w > 0 ? total_wy / total_w : 0.0;
  // Minimising residual error == maximising SL^2/WL + SR^2/WR.
  double best_gain = total_w > 0 ? total_wy * total_wy / total_w : 0.0;

  for (std::size_t f = 0; f < x.cols(); ++f) {
    const auto& order = sorted[f];
    double wl = 0.0, swl = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::size_t i = order[k];
      wl += w[i];
      swl += w[i] * target[i];
      const double xv = x(i, f);
      const double xn = x(order[k + 1], f);
      if (xv == xn) continue;
      const double wr = total_w - wl;
      const double swr = total_wy - swl;
      if (wl <= 0.0 || wr <= 0.0) continue;
      const double gain = swl * swl / wl + swr * swr / wr;
      if (gain > best_gain * (1.0 + 1e-12) + 1e-300) {
        best_gain = gain;
        best.feature = f;
        best.threshold = xv + (xn - xv) / 2.0;
        best.left = swl / wl;
        best.right = swr / wr;
      }
    }
  }
  return best;
}

}  // namespace

StumpEnsemble train_boosted_stumps(const Matrix& x, std::span<const int> y, int rounds) {
  check_training_set(x, y, 1);
  if (rounds < 1) throw Error(ErrorCode::InvalidArgument, "boosting rounds must be >= 1");
  const std::size_t n = x.rows();
  std::vector<double> target(n), w(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] ? 1.0 : -1.0;

  std::vector<std::vector<std::size_t>> sorted(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  StumpEnsemble model;
  for (int round = 0; round < rounds; ++round) {
    Stump s = fit_stump(x, target, w, sorted);
    model.stumps.push_back(s);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-target[i] * s(x.row(i)));
      sum += w[i];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) break;
    for (double& wi : w) wi /= sum;
  }
  return model;
}

// ---------------------------------------------------------------------------

double LogisticModel::predict_proba(std::span<const double> x) const {
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    z += weights[j] * (x[j] - center[j]) / scale[j];
  }
  return 1.0 / (1.0 + std::exp(-z));
}

LogisticModel train_logistic(const Matrix& x, std::span<const int> y,
                             const LogisticOptions& options) {
  check_training_set(x, y, 1);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  LogisticModel model;
  model.center.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x(i, j);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (x(i, j) - m) * (x(i, j) - m);
    v /= static_cast<double>(n);
    model.center[j] = m;
    model.scale[j] = v > 0.0 ? std::sqrt(v) : 1.0;
  }

  // Column 0 is the intercept.
  Eigen::MatrixXd z(n, d + 1);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) z(i, j + 1) = (x(i, j) - model.center[j]) / model.scale[j];
    target(i) = y[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd reg = Eigen::VectorXd::Constant(d + 1, options.l2);
  reg(0) = 0.0;

  auto objective = [&](const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = z * beta;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // log(1 + exp(eta)) - y * eta, computed stably.
      const double e = eta(i);
      const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
      loss += softplus - target(i) * e;
    }
    return loss * inv_n + 0.5 * beta.cwiseProduct(reg).dot(beta);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  double current = objective(beta);
  bool converged = false;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    Eigen::VectorXd eta = z * beta;
    Eigen::VectorXd p(n), wdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
      p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      wdiag(i) = p(i) * (1.0 - p(i));
    }
    Eigen::VectorXd grad = z.transpose() * (p - target) * inv_n + reg.cwiseProduct(beta);
    if (grad.lpNorm<Eigen::Infinity>() < options.tolerance) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hess = z.transpose() * wdiag.asDiagonal() * z * inv_n;
    hess.diagonal() += reg;
    hess.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hess.ldlt().solve(grad);

    double t = 1.0;
    Eigen::VectorXd candidate = beta - step;
    double next = objective(candidate);
    while (next > current && t > 1e-10) {
      t *= 0.5;
      candidate = beta - t * step;
      next = objective(candidate);
    }
    if (next > current) {
      converged = true;  // no further descent possible at machine precision
      break;
    }
    const bool stalled = current - next <= 1e-15 * (1.0 + std::abs(current));
    beta = candidate;
    current = next;
    if (stalled) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::Numeric, "logistic regression did not converge");
  }
  model.intercept = beta(0);
  model.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) model.weights[j] = beta(j + 1);
  return model;
}

// ---------------------------------------------------------------------------

double DecisionTree::predict_proba(std::span<const double> x) const {
  if (nodes.empty()) return 0.5;
  int at = 0;
  while (nodes[at].feature >= 0) {
    const auto& node = nodes[at];
    at = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[at].value;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const TreeOptions& options,
              std::uint64_t seed)
      : x_(x), y_(y), options_(options), rng_(seed) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  int grow(std::vector<std::size_t> samples, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t pos = 0;
    for (std::size_t i : samples) pos += static_cast<std::size_t>(y_[i]);
    const double n = static_cast<double>(samples.size());
    const double frac = samples.empty() ? 0.5 : static_cast<double>(pos) / n;
    tree_.nodes[id].value = frac;

    const bool depth_ok = options_.max_depth <= 0 || depth < options_.max_depth;
    if (!depth_ok || pos == 0 || pos == samples.size() ||
        samples.size() < 2 * std::max<std::size_t>(options_.min_samples_leaf, 1)) {
      return id;
    }
    const Split split = best_split(samples, 2.0 * frac * (1.0 - frac));
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = features_.size();
    const std::size_t m = options_.max_features;
    if (m == 0 || m >= d) return features_;
    std::vector<std::size_t> pool = features_;
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(pool[i], pool[pick(rng_)]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  Split best_split(const std::vector<std::size_t>& samples, double parent_impurity) {
    Split best;
    best.impurity = parent_impurity - 1e-12;
    const std::size_t n = samples.size();
    const std::size_t min_leaf = std::max<std::size_t>(options_.min_samples_leaf, 1);
    std::size_t total_pos = 0;
    for (std::size_t i : samples) total_pos += static_cast<std::size_t>(y_[i]);

    std::vector<std::pair<double, int>> column(n);
    for (std::size_t f : candidate_features()) {
      for (std::size_t k = 0; k < n; ++k) column[k] = {x_(samples[k], f), y_[samples[k]]};
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_pos += static_cast<std::size_t>(column[k].second);
        if (column[k].first == column[k + 1].first) continue;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double pl = static_cast<double>(left_pos) / static_cast<double>(nl);
        const double pr = static_cast<double>(total_pos - left_pos) / static_cast<double>(nr);
        const double impurity = (static_cast<double>(nl) * 2.0 * pl * (1.0 - pl) +
                                 static_cast<double>(nr) * 2.0 * pr * (1.0 - pr)) /
                                static_cast<double>(n);
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = static_cast<int>(f);
          best.threshold = column[k].first + (column[k + 1].first - column[k].first) / 2.0;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  TreeOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> features_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree train_tree(const Matrix& x, std::span<const int> y,
                        std::span<const std::size_t> samples, const TreeOptions& options,
                        std::uint64_t seed) {
  TreeBuilder builder(x, y, options, seed);
  return builder.build(std::vector<std::size_t>(samples.begin(), samples.end()));
}

DecisionTree train_tree(const Matrix& x, std::span<const int> y, const TreeOptions& options) {
  check_training_set(x, y, 1);
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), 0);
  return train_tree(x, y, all, options, 0);
}

double RandomForest::predict_proba(std::span<const double> x) const {
  if (trees.empty()) return 0.5;
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict_proba(x);
  return sum / static_cast<double>(trees.size());
}

RandomForest train_random_forest(const Matrix& x, std::span<const int> y,
                                 const ForestOptions& options) {
  check_training_set(x, y, 1);
  if (options.trees < 1) throw Error(ErrorCode::InvalidArgument, "forest needs >= 1 tree");
  const std::size_t n = x.rows();
  TreeOptions tree_options;
  tree_options.max_depth = options.max_depth;
  tree_options.min_samples_leaf = options.min_samples_leaf;
  tree_options.max_features =
      options.max_features != 0
          ? std::min(options.max_features, x.cols())
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  RandomForest forest;
  forest.trees.reserve(static_cast<std::size_t>(options.trees));
  std::vector<std::size_t> bag(n);
  for (int t = 0; t < options.trees; ++t) {
    for (auto& i : bag) i = pick(rng);
    forest.trees.push_back(train_tree(x, y, bag, tree_options, rng()));
  }
  return forest;
}

// ---------------------------------------------------------------------------

double GaussianNaiveBayes::predict_proba(std::span<const double> x) const {
  double log_joint[2] = {std::log(1.0 - prior_positive), std::log(prior_positive)};
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = variance[c][j];
      const double diff = x[j] - mean[c][j];
      log_joint[c] += -0.5 * std::log(2.0 * M_PI * v) - diff * diff / (2.0 * v);
    }
  }
  const double hi = std::max(log_joint[0], log_joint[1]);
  const double e0 = std::exp(log_joint[0] - hi);
  const double e1 = std::exp(log_joint[1] - hi);
  return e1 / (e0 + e1);
}

GaussianNaiveBayes train_naive_bayes(const Matrix& x, std::span<const int> y) {
  check_training_set(x, y, 1);
  const std::size_t n = x.rows(), d = x.cols();
  GaussianNaiveBayes model;
  std::size_t count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    model.mean[c].assign(d, 0.0);
    model.variance[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ++count[y[i]];
    for (std::size_t j = 0; j < d; ++j) model.mean[y[i]][j] += x(i, j);
  }
  for (int c = 0; c < 2; ++c) {
    for (auto& m : model.mean[c]) m /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x(i, j) - model.mean[y[i]][j];
      model.variance[y[i]][j] += diff * diff;
    }
  }
  // Variance floor relative to the widest feature.
  double widest = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x(i, j);
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) v += (x(i, j) - m) * (x(i, j) - m);
    widest = std::max(widest, v / static_cast<double>(n));
  }
  const double floor = widest > 0.0 ? 1e-9 * widest : 1e-9;
  for (int c = 0; c < 2; ++c) {
    for (auto& v : model.variance[c]) v = v / static_cast<double>(count[c]) + floor;
  }
  model.prior_positive = static_cast<double>(count[1]) / static_cast<double>(n);
  return model;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const StumpEnsemble& m) {
  nlohmann::json stumps = nlohmann::json::array();
  for (const auto& s : m.stumps) {
    stumps.push_back({{"feature", s.feature},
                      {"threshold", s.threshold},
                      {"left", s.left},
                      {"right", s.right}});
  }
  return {{"stumps", stumps}};
}

nlohmann::json to_json(const LogisticModel& m) {
  return {{"center", m.center},
          {"scale", m.scale},
          {"weights", m.weights},
          {"intercept", m.intercept}};
}

nlohmann::json to_json(const DecisionTree& m) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : m.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  }
  return {{"nodes", nodes}};
}

StumpEnsemble stumps_from_json(const nlohmann::json& j) {
  StumpEnsemble m;
  for (const auto& s : j.at("stumps")) {
    Stump stump;
    stump.feature = s.at("feature").get<std::size_t>();
    stump.threshold = s.at("threshold").is_null() ? std::numeric_limits<double>::infinity()
                                                  : s.at("threshold").get<double>();
    stump.left = s.at("left").get<double>();
    stump.right = s.at("right").get<double>();
    m.stumps.push_back(stump);
  }
  return m;
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
  LogisticModel m;
  m.center = j.at("center").get<std::vector<double>>();
  m.scale = j.at("scale").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  if (m.center.size() != m.weights.size() || m.scale.size() != m.weights.size()) {
    throw Error(ErrorCode::Parse, "logistic model: inconsistent vector sizes");
  }
  return m;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree m;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.value = n.at(4).get<double>();
    m.nodes.push_back(node);
  }
  return m;
}

}  // namespace irrkit::ml
