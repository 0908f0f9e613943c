#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "irrkit/corpus.hpp"
#include "irrkit/ml.hpp"
#include "irrkit/scores.hpp"

namespace irrkit {

struct DeathPhrase {
  std::string text;   // verbatim, lowercase
  bool stem = false;  // matches as a word prefix ("obituar")
};

struct LexiconSet {
  std::set<std::string> positive_terms;
  std::set<std::string> negative_terms;
  std::set<std::string> positive_emoticons;
  std::set<std::string> negative_emoticons;
  std::set<std::string> slang_terms;
  std::map<std::string, double> booster_terms;
  std::vector<DeathPhrase> death_terms;
  std::string name_prefix = "userid_";

  // Small built-in lexicon (also shipped under data/lexicon/).
  static const LexiconSet& builtin();

  // Throws Error(Validation) when the invariants do not hold.
  void validate() const;

  bool is_positive(const std::string& token) const;
  bool is_negative(const std::string& token) const;
  bool is_slang(const std::string& token) const;
  bool is_emoticon(const std::string& token) const;
};

// Directory layout: positive.txt, negative.txt, positive_emoticons.txt,
// negative_emoticons.txt, slang.txt, boosters.tsv (term TAB increment),
// death.txt (one phrase per line; a trailing '*' marks a word stem).
// Missing files leave the corresponding set empty.
LexiconSet load_lexicons(const std::string& dir);
void save_lexicons(const std::string& dir, const LexiconSet& lexicons);

struct Token {
  std::string text;
  int trailing_exclamations = 0;

  Token() = default;
  Token(std::string t, int excl = 0) : text(std::move(t)), trailing_exclamations(excl) {}
  friend bool operator==(const Token&, const Token&) = default;
};

struct Tokenization {
  std::vector<Token> tokens;
  int sentences = 0;
  int question_marks = 0;
  int exclamation_marks = 0;

  std::vector<std::string> texts() const;
};

Tokenization tokenize(std::string_view body, const LexiconSet& lexicons);

struct SentimentStrength {
  double positive = 1.0;
  double negative = 1.0;
};

// Base 1; a lexicon hit scores 2, plus the increment of a booster directly
// before it, plus 1 for two or more trailing '!'. Per polarity the maximum
// token strength is kept, capped at 5.
SentimentStrength sentiment_strength(std::span<const Token> tokens, const LexiconSet& lexicons);

// Number of hit tokens whose individual strength is at least 3.
int strong_emotion_tokens(std::span<const Token> tokens, const LexiconSet& lexicons);

enum class Feature : std::size_t {
  PostLength,
  Pos,
  Neg,
  NameMention,
  Slang,
  PosStrength,
  NegStrength,
  PosVsNeg,
  PosVsNegStrength,
  Sentence,
  AvgWordLen,
  QuestionMarks,
  ExclamationMarks,
};

inline constexpr std::size_t kFeatureCount = 13;

const std::array<std::string_view, kFeatureCount>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector extract_features(std::string_view body, const LexiconSet& lexicons);
inline FeatureVector extract_features(const Post& post, const LexiconSet& lexicons) {
  return extract_features(post.body, lexicons);
}

bool death_mention(std::string_view body, const LexiconSet& lexicons);
inline bool death_mention(const Post& post, const LexiconSet& lexicons) {
  return death_mention(post.body, lexicons);
}

// --- classifiers ------------------------------------------------------------

enum class ModelKind { AdaBoostStumps, Logistic, DecisionTree };

const char* model_kind_name(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);

struct TrainConfig {
  ModelKind kind = ModelKind::AdaBoostStumps;
  int rounds = 50;
  std::uint64_t seed = 42;
  std::vector<std::size_t> feature_subset;  // empty means all features
  int tree_depth = 5;
  double l2 = 1e-4;
};

struct LabeledExample {
  FeatureVector features;
  int positive = 0;  // 1 = pos, 0 = neg
};

class SentimentModel {
 public:
  using Params = std::variant<ml::StumpEnsemble, ml::LogisticModel, ml::DecisionTree>;

  SentimentModel(ModelKind kind, Params params, std::vector<std::size_t> feature_subset,
                 TrainConfig meta);

  ModelKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& feature_subset() const noexcept { return subset_; }
  const TrainConfig& training_meta() const noexcept { return meta_; }
  const Params& params() const noexcept { return params_; }

  // Pr(c = pos | features), always in [0,1].
  double posterior(const FeatureVector& features) const;

  nlohmann::json to_json() const;
  static SentimentModel from_json(const nlohmann::json& j);

 private:
  ModelKind kind_;
  Params params_;
  std::vector<std::size_t> subset_;
  TrainConfig meta_;
};

SentimentModel train_classifier(std::span<const LabeledExample> labeled, const TrainConfig& config);

struct FoldMetrics {
  std::size_t size = 0;
  double accuracy = 0.0;
  double roc_area = 0.0;  // NaN when the fold holds a single class
};

struct CvMetrics {
  double accuracy = 0.0;
  double roc_area = 0.0;
  std::vector<FoldMetrics> per_fold;
  std::vector<double> out_of_fold;  // posterior per example
};

CvMetrics cross_validate(std::span<const LabeledExample> labeled, int folds,
                         const TrainConfig& config);

struct FeatureSelection {
  std::vector<std::size_t> subset;
  double roc_area = 0.0;
};

// Greedy forward selection on CV ROC area; `exhaustive` tries all subsets.
FeatureSelection select_features(std::span<const LabeledExample> labeled, int folds,
                                 const TrainConfig& config, bool exhaustive = false);

void save_model(const std::string& path, const SentimentModel& model);
SentimentModel load_model(const std::string& path);

// CSV post_id,label with label in {pos, neg}; optional header row.
std::map<PostId, int> load_sentiment_labels(const std::string& path);
std::map<PostId, int> read_sentiment_labels(std::istream& in);

std::vector<LabeledExample> labeled_examples(const Corpus& corpus,
                                             const std::map<PostId, int>& labels,
                                             const LexiconSet& lexicons);

PostScores score_posts(const Corpus& corpus, const SentimentModel& model,
                       const LexiconSet& lexicons, double threshold = 0.5);

}  // namespace irrkit
