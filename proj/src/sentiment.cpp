#include "irrkit/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "irrkit/io.hpp"
#include "irrkit/stats.hpp"

namespace irrkit {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "PostLength", "Pos",      "Neg",              "NameMention", "Slang",
      "PosStrength", "NegStrength", "PosVsNeg",     "PosVsNegStrength",
      "Sentence",   "AvgWordLen", "QuestionMarks", "ExclamationMarks"};
  return names;
}

namespace {

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

FeatureVector extract_features(std::string_view body, const LexiconSet& lex) {
  const Tokenization tok = tokenize(body, lex);
  const auto strength = sentiment_strength(tok.tokens, lex);

  double pos = 0, neg = 0, names = 0, slang = 0, letters = 0;
  for (const auto& t : tok.tokens) {
    if (lex.is_positive(t.text)) ++pos;
    if (lex.is_negative(t.text)) ++neg;
    if (lex.is_slang(t.text)) ++slang;
    if (!lex.name_prefix.empty() && t.text.size() > lex.name_prefix.size() &&
        t.text.compare(0, lex.name_prefix.size(), lex.name_prefix) == 0) {
      ++names;
    }
    letters += static_cast<double>(codepoint_length(t.text));
  }

  FeatureVector f;
  const double length = static_cast<double>(tok.tokens.size());
  f[Feature::PostLength] = length;
  if (length > 0) {
    f[Feature::Pos] = pos / length;
    f[Feature::Neg] = neg / length;
    f[Feature::NameMention] = names / length;
    f[Feature::Slang] = slang / length;
    f[Feature::AvgWordLen] = letters / length;
  }
  f[Feature::PosStrength] = strength.positive;
  f[Feature::NegStrength] = strength.negative;
  f[Feature::PosVsNeg] = (pos + 1.0) / (neg + 1.0);
  f[Feature::PosVsNegStrength] = strength.positive / strength.negative;
  f[Feature::Sentence] = tok.sentences;
  f[Feature::QuestionMarks] = tok.question_marks;
  f[Feature::ExclamationMarks] = tok.exclamation_marks;
  return f;
}

// ---------------------------------------------------------------------------

const char* model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::AdaBoostStumps: return "adaboost-stumps";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::DecisionTree: return "decision-tree";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::AdaBoostStumps, ModelKind::Logistic, ModelKind::DecisionTree}) {
    if (name == model_kind_name(k)) return k;
  }
  throw Error(ErrorCode::Config, "unknown sentiment model kind '" + std::string(name) + "'");
}

SentimentModel::SentimentModel(ModelKind kind, Params params,
                               std::vector<std::size_t> feature_subset, TrainConfig meta)
    : kind_(kind), params_(std::move(params)), subset_(std::move(feature_subset)),
      meta_(std::move(meta)) {
  for (std::size_t f : subset_) {
    if (f >= kFeatureCount) throw Error(ErrorCode::InvalidArgument, "feature index out of range");
  }
}

double SentimentModel::posterior(const FeatureVector& features) const {
  std::vector<double> x;
  x.reserve(subset_.size());
  for (std::size_t f : subset_) x.push_back(features.values[f]);
  const double p = std::visit([&](const auto& m) { return m.predict_proba(x); }, params_);
  if (std::isnan(p)) return 0.5;
  return std::clamp(p, 0.0, 1.0);
}

nlohmann::json SentimentModel::to_json() const {
  nlohmann::json j;
  j["format"] = "irrkit-sentiment-model";
  j["version"] = 1;
  j["kind"] = model_kind_name(kind_);
  j["feature_subset"] = subset_;
  nlohmann::json names = nlohmann::json::array();
  for (std::size_t f : subset_) names.push_back(feature_names()[f]);
  j["feature_names"] = names;
  j["training"] = {{"seed", meta_.seed},
                   {"rounds", meta_.rounds},
                   {"tree_depth", meta_.tree_depth},
                   {"l2", meta_.l2}};
  j["params"] = std::visit([](const auto& m) { return ml::to_json(m); }, params_);
  return j;
}

SentimentModel SentimentModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "irrkit-sentiment-model") {
      throw Error(ErrorCode::Parse, "not a sentiment model document");
    }
    if (j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::Parse, "unsupported sentiment model version");
    }
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    TrainConfig meta;
    meta.kind = kind;
    const auto& tr = j.at("training");
    meta.seed = tr.at("seed").get<std::uint64_t>();
    meta.rounds = tr.at("rounds").get<int>();
    meta.tree_depth = tr.at("tree_depth").get<int>();
    meta.l2 = tr.at("l2").get<double>();
    auto subset = j.at("feature_subset").get<std::vector<std::size_t>>();
    meta.feature_subset = subset;
    const auto& p = j.at("params");
    Params params;
    switch (kind) {
      case ModelKind::AdaBoostStumps: params = ml::stumps_from_json(p); break;
      case ModelKind::Logistic: params = ml::logistic_from_json(p); break;
      case ModelKind::DecisionTree: params = ml::tree_from_json(p); break;
    }
    return SentimentModel(kind, std::move(params), std::move(subset), meta);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed sentiment model: ") + e.what());
  }
}

namespace {

std::vector<std::size_t> resolve_subset(const TrainConfig& config) {
  if (config.feature_subset.empty()) {
    std::vector<std::size_t> all(kFeatureCount);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  auto subset = config.feature_subset;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (subset.back() >= kFeatureCount) {
    throw Error(ErrorCode::Config, "feature subset index out of range");
  }
  return subset;
}

ml::Matrix design(std::span<const LabeledExample> labeled, std::span<const std::size_t> subset) {
  ml::Matrix x(labeled.size(), subset.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    for (std::size_t c = 0; c < subset.size(); ++c) x(i, c) = labeled[i].features.values[subset[c]];
  }
  return x;
}

}  // namespace

SentimentModel train_classifier(std::span<const LabeledExample> labeled, const TrainConfig& config) {
  const auto subset = resolve_subset(config);
  const ml::Matrix x = design(labeled, subset);
  std::vector<int> y;
  y.reserve(labeled.size());
  for (const auto& e : labeled) y.push_back(e.positive ? 1 : 0);
  ml::check_training_set(x, y, 2);

  SentimentModel::Params params;
  switch (config.kind) {
    case ModelKind::AdaBoostStumps:
      params = ml::train_boosted_stumps(x, y, config.rounds);
      break;
    case ModelKind::Logistic: {
      ml::LogisticOptions opts;
      opts.l2 = config.l2;
      params = ml::train_logistic(x, y, opts);
      break;
    }
    case ModelKind::DecisionTree: {
      ml::TreeOptions opts;
      opts.max_depth = config.tree_depth;
      params = ml::train_tree(x, y, opts);
      break;
    }
  }
  TrainConfig meta = config;
  meta.feature_subset = subset;
  return SentimentModel(config.kind, std::move(params), subset, meta);
}

CvMetrics cross_validate(std::span<const LabeledExample> labeled, int folds,
                         const TrainConfig& config) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "cross_validate: need k >= 2");
  if (labeled.size() < static_cast<std::size_t>(folds)) {
    throw Error(ErrorCode::InvalidArgument, "cross_validate: fewer examples than folds");
  }
  std::vector<int> y;
  for (const auto& e : labeled) y.push_back(e.positive ? 1 : 0);
  const auto fold_of = ml::stratified_folds(y, folds, config.seed);

  CvMetrics out;
  out.out_of_fold.assign(labeled.size(), 0.5);
  for (int k = 0; k < folds; ++k) {
    std::vector<LabeledExample> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (fold_of[i] == k) {
        test.push_back(i);
      } else {
        train.push_back(labeled[i]);
      }
    }
    const SentimentModel model = train_classifier(train, config);
    FoldMetrics fm;
    fm.size = test.size();
    std::vector<double> scores;
    std::vector<int> truth;
    std::size_t correct = 0;
    for (std::size_t i : test) {
      const double p = model.posterior(labeled[i].features);
      out.out_of_fold[i] = p;
      scores.push_back(p);
      truth.push_back(y[i]);
      if ((p > 0.5 ? 1 : 0) == y[i]) ++correct;
    }
    fm.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
    fm.roc_area = roc_auc(scores, truth);
    out.per_fold.push_back(fm);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if ((out.out_of_fold[i] > 0.5 ? 1 : 0) == y[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(labeled.size());
  out.roc_area = roc_auc(out.out_of_fold, y);
  return out;
}

FeatureSelection select_features(std::span<const LabeledExample> labeled, int folds,
                                 const TrainConfig& config, bool exhaustive) {
  auto evaluate = [&](const std::vector<std::size_t>& subset) {
    TrainConfig c = config;
    c.feature_subset = subset;
    return cross_validate(labeled, folds, c).roc_area;
  };

  FeatureSelection best;
  best.roc_area = -1.0;
  if (exhaustive) {
    for (unsigned mask = 1; mask < (1u << kFeatureCount); ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        if (mask & (1u << f)) subset.push_back(f);
      }
      const double auc = evaluate(subset);
      if (auc > best.roc_area + 1e-12) best = {subset, auc};
    }
    return best;
  }

  std::vector<std::size_t> chosen;
  while (chosen.size() < kFeatureCount) {
    std::size_t pick = kFeatureCount;
    double pick_auc = best.roc_area;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (std::find(chosen.begin(), chosen.end(), f) != chosen.end()) continue;
      auto trial = chosen;
      trial.push_back(f);
      std::sort(trial.begin(), trial.end());
      const double auc = evaluate(trial);
      if (auc > pick_auc + 1e-12) {
        pick = f;
        pick_auc = auc;
      }
    }
    if (pick == kFeatureCount) break;
    chosen.push_back(pick);
    std::sort(chosen.begin(), chosen.end());
    best = {chosen, pick_auc};
  }
  return best;
}

void save_model(const std::string& path, const SentimentModel& model) {
  io::write_file(path, model.to_json().dump(2) + "\n");
}

SentimentModel load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "model file " + path + " is not valid JSON: " + e.what());
  }
  return SentimentModel::from_json(j);
}

std::map<PostId, int> read_sentiment_labels(std::istream& in) {
  std::map<PostId, int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = io::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = io::split_csv(t);
    if (line_no == 1 && fields.size() == 2 && fields[0] == "post_id") continue;
    if (fields.size() != 2) {
      throw Error(ErrorCode::Parse, "labels line " + std::to_string(line_no) +
                                        ": expected post_id,label");
    }
    const auto label = io::to_lower(io::trim(fields[1]));
    int value = 0;
    if (label == "pos") {
      value = 1;
    } else if (label != "neg") {
      throw Error(ErrorCode::Parse, "labels line " + std::to_string(line_no) +
                                        ": label must be pos or neg");
    }
    if (!out.emplace(io::trim(fields[0]), value).second) {
      throw Error(ErrorCode::Validation, "duplicate label for post " + fields[0]);
    }
  }
  return out;
}

std::map<PostId, int> load_sentiment_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open labels file " + path);
  return read_sentiment_labels(in);
}

std::vector<LabeledExample> labeled_examples(const Corpus& corpus,
                                             const std::map<PostId, int>& labels,
                                             const LexiconSet& lexicons) {
  std::vector<LabeledExample> out;
  out.reserve(labels.size());
  for (const auto& [post_id, label] : labels) {
    const Post* post = corpus.find_post(post_id);
    if (!post) throw Error(ErrorCode::NotFound, "labeled post " + post_id + " not in corpus");
    out.push_back({extract_features(*post, lexicons), label});
  }
  return out;
}

PostScores score_posts(const Corpus& corpus, const SentimentModel& model,
                       const LexiconSet& lexicons, double threshold) {
  PostScores scores(threshold);
  for (const auto& thread : corpus.threads()) {
    for (const auto& post : thread.posts()) {
      scores.set(post.post_id, model.posterior(extract_features(post, lexicons)));
    }
  }
  return scores;
}

}  // namespace irrkit
