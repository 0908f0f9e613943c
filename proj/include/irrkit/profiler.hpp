#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "irrkit/corpus.hpp"
#include "irrkit/graph.hpp"
#include "irrkit/influence.hpp"
#include "irrkit/ml.hpp"
#include "irrkit/scores.hpp"
#include "irrkit/sentiment.hpp"

namespace irrkit {

// --- per-user features ------------------------------------------------------

// One row per user, one column per feature.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<UserId> users;
  ml::Matrix values;

  std::optional<std::size_t> column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
  FeatureTable without(std::string_view name) const;
  FeatureTable with_column(std::string name, const std::vector<double>& values) const;

  void write_csv(std::ostream& out) const;
};

// Per-post topic probability vectors.
class TopicDistributions {
 public:
  TopicDistributions() = default;
  explicit TopicDistributions(std::size_t topics) : topics_(topics) {}

  std::size_t topic_count() const noexcept { return topics_; }
  void set(const PostId& post, std::vector<double> distribution);
  const std::vector<double>* find(std::string_view post) const;

  // CSV: post_id,p1,...,pT (optional header starting with post_id).
  static TopicDistributions load(const std::string& path);

  // Deterministic fallback: tokens hashed (FNV-1a) onto `topics` pseudo-topics.
  static TopicDistributions hashed(const Corpus& corpus, const LexiconSet& lexicons,
                                   std::size_t topics = 20);

 private:
  std::size_t topics_ = 0;
  std::map<PostId, std::vector<double>, std::less<>> distributions_;
};

double topic_entropy(std::span<const double> distribution);
double topic_log_energy(std::span<const double> distribution, double epsilon = 1e-12);

struct UserFeatureInputs {
  const Corpus* corpus = nullptr;
  const LexiconSet* lexicons = nullptr;
  const DirectedGraph* graph = nullptr;
  const InfluenceCounts* irr = nullptr;
  const TopicDistributions* topics = nullptr;  // null -> hashed fallback
};

// Feature columns, in order:
//   initial_posts replies_to_others threads_touched posts_after_mine
//   avg_response_delay_minutes total_post_bytes avg_post_bytes
//   avg_top30_post_bytes active_days activity_span_days posts_per_active_day
//   posts_per_span_day in_degree out_degree betweenness pagerank
//   pct_positive_words pct_negative_words pct_slang pct_strong_emotion_words
//   pos_neg_word_ratio topic_entropy topic_log_energy irr_count
// A user who never got a later post from someone else gets the corpus-wide
// maximum observed delay as avg_response_delay_minutes. activity_span_days is
// last active day minus first; posts_per_span_day divides by span + 1.
FeatureTable user_features(const UserFeatureInputs& inputs);

const std::vector<std::string>& user_feature_names();

// Appends cluster_mean_<feature> columns: the mean of each feature over the
// user's cluster. Users missing from `clusters` form a singleton cluster.
FeatureTable augment_with_clusters(const FeatureTable& table,
                                   const std::map<UserId, std::string>& clusters);

std::map<UserId, std::string> load_clusters(const std::string& path);

// --- labels, rankings, evaluation -------------------------------------------

struct IuLabelSet {
  std::set<UserId> influential;
  std::string provenance;

  static IuLabelSet load(const std::string& path);
  static IuLabelSet unite(const IuLabelSet& a, const IuLabelSet& b);
  bool contains(const UserId& u) const { return influential.count(u) != 0; }
  std::size_t size() const noexcept { return influential.size(); }
};

struct RankEntry {
  UserId user;
  double score = 0.0;
};

// Score descending, then user_id ascending.
struct Ranking {
  std::string source;
  std::vector<RankEntry> entries;

  static Ranking from_scores(std::string source, const std::map<UserId, double>& scores);
  static Ranking load(const std::string& path);
  void write_csv(std::ostream& out) const;
};

const std::vector<std::string>& ranking_metrics();

struct MetricInputs {
  const Corpus* corpus = nullptr;
  const PostScores* scores = nullptr;  // needed for irr_count
  double threshold = 0.5;
  bool restrict_eligible = false;      // early_replies_24h over eligible threads only
};

// Throws Error(Config) for an unknown metric name.
std::map<UserId, double> metric_scores(std::string_view metric, const MetricInputs& inputs);
Ranking rank_users(std::string_view metric, const MetricInputs& inputs);

struct TopKResult {
  std::size_t k = 0;
  std::size_t hits = 0;
  double value = 0.0;
  double max_possible = 0.0;
};

TopKResult topk_recall(const Ranking& ranking, const IuLabelSet& labels, std::size_t k);
TopKResult topk_precision(const Ranking& ranking, const IuLabelSet& labels, std::size_t k);

// {"labels": ..., "sources": [{"source", "results": [{k, recall, ...}]}]}
nlohmann::json evaluation_report(const std::vector<Ranking>& rankings, const IuLabelSet& labels,
                                 const std::vector<std::size_t>& ks);

// --- influential-user classifiers ------------------------------------------

enum class IuModelKind { NaiveBayes, Logistic, RandomForest };

const char* iu_model_kind_name(IuModelKind kind) noexcept;
IuModelKind parse_iu_model_kind(std::string_view name);

struct IuTrainOptions {
  int folds = 10;
  std::uint64_t seed = 42;
  int forest_trees = 100;
  double logistic_l2 = 1e-2;
  // Stacked forest: every column is a split candidate, leaves hold at least this many users.
  std::size_t ensemble_min_leaf = 10;
};

using IuModel = std::variant<ml::GaussianNaiveBayes, ml::LogisticModel, ml::RandomForest>;

// Per-user probability of being influential, aligned with `users`.
struct UserProbabilities {
  std::string source;
  std::vector<UserId> users;
  std::vector<double> values;

  std::map<UserId, double> as_map() const;
};

struct IuTrainResult {
  IuModel model;                  // fit on every user
  UserProbabilities out_of_fold;  // one cross-validated prediction per user
};

std::vector<int> label_vector(const std::vector<UserId>& users, const IuLabelSet& labels);

IuTrainResult train_iu_base(const FeatureTable& features, const IuLabelSet& labels,
                            IuModelKind kind, const IuTrainOptions& options = {});

// Random forest stacked on base-model outputs, optionally with irr_count as an
// extra input column.
IuTrainResult train_iu_ensemble(const std::vector<UserProbabilities>& base_outputs,
                                const IuLabelSet& labels, const IuTrainOptions& options = {},
                                const std::vector<double>* irr_column = nullptr);

double predict_iu(const IuModel& model, std::span<const double> x);

}  // namespace irrkit
