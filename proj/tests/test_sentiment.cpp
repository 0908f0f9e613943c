#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "irrkit/error.hpp"
#include "irrkit/sentiment.hpp"
#include "irrkit/stats.hpp"
#include "irrkit/synth.hpp"

using namespace irrkit;

namespace {

const LexiconSet& lex() { return LexiconSet::builtin(); }

SynthOutput small_synth(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.user_count = 300;
  cfg.thread_count = 600;
  cfg.influencer_count = 10;
  cfg.chatty_count = 10;
  cfg.seed = seed;
  return generate(cfg);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("irrkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("tokenize keeps words and counts terminal runs") {
  auto t = tokenize("Hooray! The tumor is gone", lex());
  CHECK(t.texts() == std::vector<std::string>{"hooray", "the", "tumor", "is", "gone"});
  CHECK(t.sentences == 2);
  CHECK(t.exclamation_marks == 1);

  auto empty = tokenize("", lex());
  CHECK(empty.tokens.empty());
  CHECK(empty.sentences == 0);

  auto emo = tokenize(":-) LOL", lex());
  CHECK(emo.texts() == std::vector<std::string>{":-)", "lol"});

  auto runs = tokenize("Wait... what?! Really", lex());
  CHECK(runs.sentences == 3);
  CHECK(runs.question_marks == 1);
}

TEST_CASE("tokenize attaches trailing exclamations to the previous token") {
  auto t = tokenize("great!! ok !", lex());
  REQUIRE(t.tokens.size() == 2);
  CHECK(t.tokens[0].trailing_exclamations == 2);
  CHECK(t.tokens[1].trailing_exclamations == 0);
}

TEST_CASE("feature formulas on small posts") {
  // 10 words, two positive and no negative.
  auto f = extract_features("good day and a great one for all of us", lex());
  CHECK(f[Feature::PostLength] == 10);
  CHECK(f[Feature::Pos] == doctest::Approx(0.2));
  CHECK(f[Feature::Neg] == 0.0);
  CHECK(f[Feature::PosVsNeg] == 3.0);

  auto e = extract_features("", lex());
  CHECK(e[Feature::PostLength] == 0);
  CHECK(e[Feature::Pos] == 0);
  CHECK(e[Feature::Neg] == 0);
  CHECK(e[Feature::PosVsNeg] == 1);
  CHECK(e[Feature::PosVsNegStrength] == 1);
  CHECK(e[Feature::PosStrength] == 1);
  CHECK(e[Feature::NegStrength] == 1);
}

TEST_CASE("features equal an independent tally over 50 assembled posts") {
  // Each post is assembled from known pieces, so the expected features come
  // from the assembly record rather than from re-tokenizing.
  const std::vector<std::string> positive(lex().positive_terms.begin(), lex().positive_terms.end());
  const std::vector<std::string> negative(lex().negative_terms.begin(), lex().negative_terms.end());
  const std::vector<std::string> filler = {"the", "doctor", "said", "we", "will", "see", "tomorrow", "chemo"};
  const std::vector<std::string> slang = {"lol", "omg", "btw", "thx"};
  std::mt19937_64 rng(50);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };

  for (int n = 0; n < 50; ++n) {
    std::string body;
    double words = 0, pos = 0, neg = 0, sl = 0, names = 0, letters = 0;
    double sentences = 0, questions = 0, exclaims = 0, pos_strength = 1, neg_strength = 1;
    const int sentence_count = 1 + static_cast<int>(rng() % 3);
    std::string prev;  // boosters reach across sentence punctuation
    for (int s = 0; s < sentence_count; ++s) {
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int w = 0; w < len; ++w) {
        std::string word;
        const int kind = static_cast<int>(rng() % 6);
        if (kind == 0) word = pick(positive), ++pos;
        else if (kind == 1) word = pick(negative), ++neg;
        else if (kind == 2) word = pick(slang), ++sl;
        else if (kind == 3) word = "userid_" + std::to_string(rng() % 100), ++names;
        else if (kind == 4) word = "very";
        else word = pick(filler);
        if (kind <= 1) {
          const double strength = prev == "very" ? 3.0 : 2.0;
          (kind == 0 ? pos_strength : neg_strength) =
              std::max(kind == 0 ? pos_strength : neg_strength, strength);
        }
        if (!body.empty()) body += ' ';
        body += word;
        letters += static_cast<double>(word.size());
        ++words;
        prev = word;
      }
      const int end = static_cast<int>(rng() % 4);
      if (end == 0) body += ".", ++sentences;
      else if (end == 1) body += "?", ++sentences, ++questions;
      else if (end == 2) body += "!", ++sentences, ++exclaims;
      else if (s + 1 < sentence_count) body += " ...", ++sentences;
      else ++sentences;  // unterminated tail
    }
    CAPTURE(body);
    const auto f = extract_features(body, lex());
    CHECK(f[Feature::PostLength] == words);
    CHECK(f[Feature::Pos] == doctest::Approx(pos / words));
    CHECK(f[Feature::Neg] == doctest::Approx(neg / words));
    CHECK(f[Feature::Slang] == doctest::Approx(sl / words));
    CHECK(f[Feature::NameMention] == doctest::Approx(names / words));
    CHECK(f[Feature::AvgWordLen] == doctest::Approx(letters / words));
    CHECK(f[Feature::PosVsNeg] == doctest::Approx((pos + 1) / (neg + 1)));
    CHECK(f[Feature::PosStrength] == pos_strength);
    CHECK(f[Feature::NegStrength] == neg_strength);
    CHECK(f[Feature::PosVsNegStrength] == doctest::Approx(pos_strength / neg_strength));
    CHECK(f[Feature::Sentence] == sentences);
    CHECK(f[Feature::QuestionMarks] == questions);
    CHECK(f[Feature::ExclamationMarks] == exclaims);
  }
}

TEST_CASE("feature extraction is pure") {
  const std::string body = "So happy!!! The scan was clear :) thx userid_12";
  CHECK(extract_features(body, lex()) == extract_features(body, lex()));
}

TEST_CASE("sentiment strength") {
  auto strength = [](std::vector<Token> tokens) { return sentiment_strength(tokens, lex()); };
  auto s = strength({Token("good")});
  CHECK(s.positive == 2);
  CHECK(s.negative == 1);
  s = strength({Token("very"), Token("good")});
  CHECK(s.positive == 3);
  s = strength({});
  CHECK(s.positive == 1);
  CHECK(s.negative == 1);
  s = strength({Token("extremely"), Token("sad", 3)});
  CHECK(s.negative == 5);
  s = strength({Token("absolutely"), Token("extremely"), Token("awful", 2)});
  CHECK(s.negative == 5);  // capped
  CHECK(strong_emotion_tokens(std::vector<Token>{Token("very"), Token("good"), Token("bad")}, lex()) == 1);
}

TEST_CASE("death mentions") {
  CHECK(death_mention("her funeral is tomorrow", lex()));
  CHECK_FALSE(death_mention("we found a great dietitian", lex()));
  CHECK(death_mention("obituaries were published", lex()));
  CHECK(death_mention("My Dad PASSED AWAY last year", lex()));
  CHECK_FALSE(death_mention("a diet plan", lex()));
  CHECK_FALSE(death_mention("", lex()));
}

TEST_CASE("builtin lexicon passes validation and survives a save/load round trip") {
  CHECK_NOTHROW(lex().validate());
  const auto dir = scratch_dir("lexicon");
  save_lexicons(dir.string(), lex());
  const auto back = load_lexicons(dir.string());
  CHECK(back.positive_terms == lex().positive_terms);
  CHECK(back.negative_terms == lex().negative_terms);
  CHECK(back.positive_emoticons == lex().positive_emoticons);
  CHECK(back.negative_emoticons == lex().negative_emoticons);
  CHECK(back.slang_terms == lex().slang_terms);
  CHECK(back.booster_terms == lex().booster_terms);
  REQUIRE(back.death_terms.size() == lex().death_terms.size());
  for (std::size_t i = 0; i < back.death_terms.size(); ++i) {
    CHECK(back.death_terms[i].text == lex().death_terms[i].text);
    CHECK(back.death_terms[i].stem == lex().death_terms[i].stem);
  }
  CHECK(back.name_prefix == lex().name_prefix);
}

TEST_CASE("shipped lexicon directory matches the builtin lexicon") {
  const auto back = load_lexicons(IRRKIT_SOURCE_DIR "/data/lexicon");
  CHECK(back.positive_terms == lex().positive_terms);
  CHECK(back.negative_terms == lex().negative_terms);
  CHECK(back.slang_terms == lex().slang_terms);
  CHECK(back.booster_terms == lex().booster_terms);
  CHECK(back.death_terms.size() == lex().death_terms.size());
}

TEST_CASE("lexicon validation rejects overlapping polarities") {
  LexiconSet bad;
  bad.positive_terms = {"fine"};
  bad.negative_terms = {"fine"};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sentiment label parsing") {
  std::istringstream in("post_id,label\np1,pos\np2,neg\n");
  auto labels = read_sentiment_labels(in);
  CHECK(labels.at("p1") == 1);
  CHECK(labels.at("p2") == 0);
  std::istringstream bad("p1,maybe\n");
  CHECK_THROWS_AS(read_sentiment_labels(bad), Error);
}

TEST_CASE("classifiers reach high CV ROC on the generated labeled sample") {
  const auto gen = small_synth(3);
  const auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  REQUIRE(labeled.size() == 298);
  for (auto kind : {ModelKind::AdaBoostStumps, ModelKind::Logistic, ModelKind::DecisionTree}) {
    TrainConfig cfg;
    cfg.kind = kind;
    const auto cv = cross_validate(labeled, 10, cfg);
    CAPTURE(model_kind_name(kind));
    CHECK(cv.roc_area >= 0.9);
    CHECK(cv.per_fold.size() == 10);
  }
}

TEST_CASE("permuted labels give chance-level CV accuracy") {
  const auto gen = small_synth(4);
  auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  std::vector<int> y;
  for (const auto& e : labeled) y.push_back(e.positive);
  std::mt19937_64 rng(17);
  std::shuffle(y.begin(), y.end(), rng);
  for (std::size_t i = 0; i < labeled.size(); ++i) labeled[i].positive = y[i];
  const auto cv = cross_validate(labeled, 10, TrainConfig{});
  CHECK(cv.accuracy >= 0.4);
  CHECK(cv.accuracy <= 0.6);
}

TEST_CASE("cross validation preconditions") {
  const auto gen = small_synth(5);
  auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  labeled.resize(5);
  CHECK_THROWS_AS(cross_validate(labeled, 10, TrainConfig{}), Error);
  CHECK_THROWS_AS(cross_validate(labeled, 1, TrainConfig{}), Error);
}

TEST_CASE("scored labels agree with planted labels and the strict threshold") {
  const auto gen = small_synth(6);
  const auto model = train_classifier(labeled_examples(gen.corpus, gen.labeled_sample, lex()), TrainConfig{});
  const auto scores = score_posts(gen.corpus, model, lex());
  REQUIRE(scores.size() == gen.corpus.post_count());
  double agree = 0;
  for (const auto& [id, label] : gen.truth.true_label) {
    const double p = scores.posterior(id);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    CHECK((scores.label(id) == Polarity::Positive) == (p > 0.5));
    agree += (p > 0.5) == (label == 1);
  }
  const double rate = agree / static_cast<double>(gen.truth.true_label.size());
  CAPTURE(rate);
  CHECK(rate >= 0.9);

  PostScores strict(0.5);
  strict.set("x", 0.5);
  CHECK(strict.label("x") == Polarity::Negative);
}

TEST_CASE("accuracy and error at a threshold sum to one") {
  const auto gen = small_synth(7);
  const auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  const auto model = train_classifier(labeled, TrainConfig{});
  for (double t : {0.3, 0.5, 0.7}) {
    std::size_t right = 0, wrong = 0;
    for (const auto& e : labeled) {
      const bool positive = model.posterior(e.features) > t;
      (positive == (e.positive == 1) ? right : wrong)++;
    }
    CHECK(right + wrong == labeled.size());
    const double acc = static_cast<double>(right) / labeled.size();
    const double err = static_cast<double>(wrong) / labeled.size();
    CHECK(std::abs(acc + err - 1.0) <= 1e-15);
  }
}

TEST_CASE("training is deterministic and models round-trip through JSON") {
  const auto gen = small_synth(8);
  const auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  const auto dir = scratch_dir("models");
  for (auto kind : {ModelKind::AdaBoostStumps, ModelKind::Logistic, ModelKind::DecisionTree}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.feature_subset = {1, 2, 7};
    const auto a = train_classifier(labeled, cfg);
    const auto b = train_classifier(labeled, cfg);
    CHECK(a.to_json() == b.to_json());
    const auto path = (dir / (std::string(model_kind_name(kind)) + ".json")).string();
    save_model(path, a);
    const auto c = load_model(path);
    CHECK(c.kind() == kind);
    CHECK(c.feature_subset() == cfg.feature_subset);
    for (const auto& e : labeled) CHECK(c.posterior(e.features) == a.posterior(e.features));
    // The empty post always gets the same posterior.
    CHECK(a.posterior(extract_features("", lex())) == c.posterior(extract_features("", lex())));
  }
}

TEST_CASE("training errors") {
  std::vector<LabeledExample> one_class(6);
  for (auto& e : one_class) e.positive = 1;
  CHECK_THROWS_AS(train_classifier(one_class, TrainConfig{}), Error);
  CHECK_THROWS_AS(parse_model_kind("svm"), Error);
}

TEST_CASE("a training exemplar on separable features scores positive") {
  std::vector<LabeledExample> ex;
  for (int i = 0; i < 20; ++i) {
    const bool p = i % 2 == 0;
    ex.push_back({extract_features(p ? "so happy and grateful" : "sad and scared tonight", lex()), p ? 1 : 0});
  }
  const auto m = train_classifier(ex, TrainConfig{});
  CHECK(m.posterior(ex[0].features) > 0.5);
  CHECK(m.posterior(ex[1].features) < 0.5);
}

TEST_CASE("greedy feature selection returns a non-empty subset") {
  const auto gen = small_synth(9);
  const auto labeled = labeled_examples(gen.corpus, gen.labeled_sample, lex());
  TrainConfig cfg;
  cfg.kind = ModelKind::Logistic;
  const auto sel = select_features(labeled, 5, cfg);
  CHECK_FALSE(sel.subset.empty());
  CHECK(sel.roc_area >= 0.9);
  for (auto f : sel.subset) CHECK(f < kFeatureCount);
}
