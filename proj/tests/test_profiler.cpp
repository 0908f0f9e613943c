#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "irrkit/io.hpp"
#include "irrkit/profiler.hpp"
#include "irrkit/synth.hpp"
#include "support.hpp"

using namespace irrkit;
using irrkit::test::corpus_of;
using irrkit::test::post;
using irrkit::test::scores_of;

namespace {

std::string uid(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%03zu", i);
  return buf;
}

// Users u000..u(n-1) ranked in index order.
Ranking ordered_ranking(std::size_t n) {
  std::map<UserId, double> scores;
  for (std::size_t i = 0; i < n; ++i) scores[uid(i)] = static_cast<double>(n - i);
  return Ranking::from_scores("fixture", scores);
}

// Labels at the given ranking positions.
IuLabelSet labels_at(const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  IuLabelSet labels;
  for (auto [from, to] : ranges) {
    for (std::size_t i = from; i < to; ++i) labels.influential.insert(uid(i));
  }
  return labels;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("irrkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Table with an informative column, a label derived from it, and noise.
struct Planted {
  FeatureTable table;
  IuLabelSet labels;
};

Planted planted_table(std::size_t n, std::uint64_t seed, bool separable) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Planted p;
  p.table.feature_names = {"irr_count", "noise_a", "noise_b", "noise_c"};
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 5 == 0;
    const double irr = separable ? (positive ? 5 + static_cast<double>(rng() % 5) : static_cast<double>(rng() % 3))
                                 : g(rng) + (positive ? 1.0 : 0.0);
    p.table.users.push_back(uid(i));
    p.table.values.append_row(std::vector<double>{irr, g(rng), g(rng), g(rng)});
    if (positive) p.labels.influential.insert(uid(i));
  }
  return p;
}

Ranking ranking_of(const UserProbabilities& probs) {
  return Ranking::from_scores(probs.source, probs.as_map());
}

}  // namespace

TEST_CASE("top-K arithmetic fixtures") {
  const auto ranking = ordered_ranking(300);
  // 41 labelled users: 21 in the top 50, 9 more by 100, 3 more by 150.
  const auto list1 = labels_at({{0, 21}, {50, 59}, {100, 103}, {150, 158}});
  REQUIRE(list1.size() == 41);
  CHECK(round3(topk_recall(ranking, list1, 50).value) == 0.512);
  CHECK(round3(topk_recall(ranking, list1, 100).value) == 0.732);
  CHECK(round3(topk_recall(ranking, list1, 150).value) == 0.805);
  CHECK(topk_recall(ranking, list1, 50).hits == 21);

  // 126 labelled users with 44 in the top 50.
  const auto all = labels_at({{0, 44}, {150, 232}});
  REQUIRE(all.size() == 126);
  CHECK(round3(topk_precision(ranking, all, 50).value) == 0.880);
  CHECK(round3(topk_recall(ranking, all, 50).max_possible) == 0.397);
  CHECK(round3(topk_recall(ranking, all, 100).max_possible) == 0.794);
  CHECK(round3(topk_precision(ranking, all, 150).max_possible) == 0.84);
}

TEST_CASE("top-K edge cases") {
  const auto ranking = ordered_ranking(20);
  const auto labels = labels_at({{15, 20}});
  CHECK(topk_recall(ranking, labels, 0).value == 0.0);
  CHECK(topk_precision(ranking, labels, 5).value == 0.0);
  CHECK_THROWS_AS(topk_precision(ranking, labels, 0), Error);
  CHECK_THROWS_AS(topk_recall(ranking, IuLabelSet{}, 5), Error);
  // K beyond the ranking length counts every ranked user.
  CHECK(topk_recall(ranking, labels, 100).value == 1.0);
}

TEST_CASE("top-K invariants") {
  std::mt19937_64 rng(126);
  std::map<UserId, double> scores;
  for (std::size_t i = 0; i < 400; ++i) scores[uid(i)] = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto ranking = Ranking::from_scores("random", scores);
  IuLabelSet a, b;
  for (std::size_t i = 0; i < 41; ++i) a.influential.insert(uid(2 * i));
  for (std::size_t i = 0; i < 85; ++i) b.influential.insert(uid(2 * i + 1));
  const auto both = IuLabelSet::unite(a, b);
  REQUIRE(both.size() == 126);
  double prev = 0.0;
  std::size_t prev_hits = 0;
  for (std::size_t k = 1; k <= 400; ++k) {
    const auto r = topk_recall(ranking, both, k);
    const auto p = topk_precision(ranking, both, k);
    CHECK(r.value >= prev);
    CHECK(p.hits >= prev_hits);
    CHECK(r.hits == p.hits);
    CHECK(static_cast<double>(r.hits) / 126.0 == r.value);
    CHECK(static_cast<double>(p.hits) / static_cast<double>(k) == p.value);
    prev = r.value;
    prev_hits = p.hits;
  }
}

TEST_CASE("ranking order and tie rule") {
  auto r = Ranking::from_scores("m", {{"A", 3}, {"B", 1}});
  CHECK(r.entries[0].user == "A");
  auto tie = Ranking::from_scores("m", {{"B", 2}, {"A", 2}});
  CHECK(tie.entries[0].user == "A");
  CHECK(tie.entries[1].user == "B");
  CHECK_THROWS_AS(Ranking::from_scores("m", {{"A", std::nan("")}}), Error);
}

TEST_CASE("ranking is invariant under strictly monotone transforms") {
  std::mt19937_64 rng(3);
  std::map<UserId, double> base, affine, cubed;
  for (std::size_t i = 0; i < 200; ++i) {
    const double v = static_cast<double>(rng() % 40);
    base[uid(i)] = v;
    affine[uid(i)] = 2 * v + 1;
    cubed[uid(i)] = v * v * v;
  }
  auto users = [](const Ranking& r) {
    std::vector<UserId> out;
    for (const auto& e : r.entries) out.push_back(e.user);
    return out;
  };
  const auto expected = users(Ranking::from_scores("a", base));
  CHECK(users(Ranking::from_scores("b", affine)) == expected);
  CHECK(users(Ranking::from_scores("c", cubed)) == expected);
}

TEST_CASE("ranking CSV round trip") {
  const auto dir = scratch_dir("ranking");
  auto r = Ranking::from_scores("metric", {{"A", 3.5}, {"B", 1e-310}, {"C", 0}});
  std::ostringstream out;
  r.write_csv(out);
  io::write_file((dir / "metric.csv").string(), out.str());
  const auto back = Ranking::load((dir / "metric.csv").string());
  CHECK(back.source == "metric");
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[0].user == "A");
  CHECK(back.entries[1].user == "B");
  CHECK(back.entries[2].user == "C");
}

TEST_CASE("label sets") {
  const auto dir = scratch_dir("labels");
  io::write_file((dir / "list1.txt").string(), "# influential\nA\nB\n");
  io::write_file((dir / "list2.txt").string(), "C\n");
  const auto a = IuLabelSet::load((dir / "list1.txt").string());
  const auto b = IuLabelSet::load((dir / "list2.txt").string());
  CHECK(a.size() == 2);
  CHECK(a.provenance == "list1.txt");
  const auto u = IuLabelSet::unite(a, b);
  CHECK(u.size() == 3);
  CHECK(u.contains("C"));
}

TEST_CASE("metric rankings") {
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10), post("r2", "t", "B", 20),
                      post("s1", "t", "A", 30), post("q0", "u", "C", 0, true)});
  MetricInputs in{&c, nullptr, 0.5, false};
  CHECK(metric_scores("threads_initiated", in) == std::map<UserId, double>{{"A", 1}, {"B", 0}, {"C", 1}});
  CHECK(metric_scores("total_posts", in) == std::map<UserId, double>{{"A", 2}, {"B", 2}, {"C", 1}});
  CHECK(metric_scores("in_degree", in).at("A") == 1);
  CHECK(metric_scores("out_degree", in).at("B") == 1);
  CHECK(metric_scores("early_replies_24h", in).at("B") == 2);
  CHECK_THROWS_AS(metric_scores("irr_count", in), Error);
  CHECK_THROWS_AS(metric_scores("karma", in), Error);
  const auto scores = scores_of({{"p0", 0.2}, {"r1", 0.9}, {"r2", 0.1}, {"s1", 0.8}, {"q0", 0.5}});
  in.scores = &scores;
  CHECK(metric_scores("irr_count", in) == std::map<UserId, double>{{"A", 0}, {"B", 1}, {"C", 0}});
  CHECK(ranking_metrics().size() == 8);
  for (const auto& m : ranking_metrics()) CHECK(rank_users(m, in).entries.size() == 3);
}

TEST_CASE("irr_count ranking equals a sort of the oracle counts") {
  SynthConfig cfg;
  cfg.user_count = 300;
  cfg.thread_count = 800;
  cfg.influencer_count = 12;
  cfg.chatty_count = 10;
  cfg.seed = 19;
  const auto gen = generate(cfg);
  const auto scores = gen.truth.scores();
  const auto oracle = oracle_irr_counts(gen.corpus, scores, 0.5);
  std::vector<std::pair<std::int64_t, UserId>> expected;
  for (const auto& [u, n] : oracle) expected.push_back({-n, u});
  std::sort(expected.begin(), expected.end());
  const auto r = rank_users("irr_count", MetricInputs{&gen.corpus, &scores, 0.5, false});
  REQUIRE(r.entries.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(r.entries[i].user == expected[i].second);
}

TEST_CASE("topic entropy and log energy") {
  for (std::size_t t : {2u, 5u, 20u}) {
    std::vector<double> uniform(t, 1.0 / static_cast<double>(t));
    CHECK(topic_entropy(uniform) == doctest::Approx(std::log(static_cast<double>(t))));
  }
  std::vector<double> point = {1.0, 0.0};
  CHECK(topic_entropy(point) == 0.0);
  CHECK(topic_log_energy(point) == doctest::Approx(std::log(1.0 + 1e-12) + std::log(1e-12)));

  TopicDistributions d(3);
  d.set("p", {2, 1, 1});
  CHECK((*d.find("p"))[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(d.set("q", {1, 1}), Error);
  CHECK_THROWS_AS(d.set("q", {1, -1, 1}), Error);
  CHECK(d.find("missing") == nullptr);
}

TEST_CASE("topic files load and missing posts are reported") {
  const auto dir = scratch_dir("topics");
  io::write_file((dir / "topics.csv").string(), "post_id,t1,t2\np0,0.5,0.5\nr1,1,0\n");
  const auto topics = TopicDistributions::load((dir / "topics.csv").string());
  CHECK(topics.topic_count() == 2);
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10), post("s1", "t", "A", 20)});
  const auto& lex = LexiconSet::builtin();
  CHECK_THROWS_AS(user_features(UserFeatureInputs{&c, &lex, nullptr, nullptr, &topics}), Error);
  io::write_file((dir / "topics.csv").string(), "post_id,t1,t2\np0,0.5,0.5\nr1,1,0\ns1,0.5,0.5\n");
  const auto full = TopicDistributions::load((dir / "topics.csv").string());
  const auto table = user_features(UserFeatureInputs{&c, &lex, nullptr, nullptr, &full});
  CHECK(table.column_values("topic_entropy")[0] == doctest::Approx(std::log(2.0)));
  CHECK(table.column_values("topic_entropy")[1] == 0.0);
}

TEST_CASE("hashed topics give every post a distribution") {
  auto c = corpus_of({post("p0", "t", "A", 0, true, "chemo starts monday"), post("r1", "t", "B", 10, false, "")});
  const auto topics = TopicDistributions::hashed(c, LexiconSet::builtin());
  CHECK(topics.topic_count() == 20);
  REQUIRE(topics.find("r1"));
  CHECK(topic_entropy(*topics.find("r1")) == doctest::Approx(std::log(20.0)));
  double sum = 0;
  for (double v : *topics.find("p0")) sum += v;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("user features on a hand-built corpus") {
  // A starts t and gets a reply from B 90 minutes later; C starts u and is
  // never answered.
  auto c = corpus_of({post("p0", "t", "A", 0, true, "so happy"), post("r1", "t", "B", 5400, false, "sad lol"),
                      post("s1", "t", "A", 7200, false, "thanks"), post("q0", "u", "C", 86400 * 3, true, "hello")});
  const auto& lex = LexiconSet::builtin();
  const auto f = user_features(UserFeatureInputs{&c, &lex, nullptr, nullptr, nullptr});
  REQUIRE(f.feature_names == user_feature_names());
  REQUIRE(f.users == std::vector<UserId>{"A", "B", "C"});
  auto at = [&](const char* name, std::size_t user) { return f.column_values(name)[user]; };
  CHECK(at("initial_posts", 0) == 1);
  CHECK(at("replies_to_others", 1) == 1);
  CHECK(at("threads_touched", 0) == 1);
  CHECK(at("posts_after_mine", 0) == 1);
  CHECK(at("posts_after_mine", 1) == 1);
  CHECK(at("avg_response_delay_minutes", 0) == 90);
  CHECK(at("avg_response_delay_minutes", 1) == 30);
  CHECK(at("avg_response_delay_minutes", 2) == 90);  // sentinel: corpus maximum
  CHECK(at("total_post_bytes", 0) == 14);
  CHECK(at("active_days", 2) == 1);
  CHECK(at("posts_per_span_day", 0) == 2);
  CHECK(at("in_degree", 0) == 1);
  CHECK(at("out_degree", 1) == 1);
  CHECK(at("pct_positive_words", 0) == doctest::Approx((0.5 + 1.0) / 2));
  CHECK(at("pct_negative_words", 1) == doctest::Approx(0.5));
  CHECK(at("pct_slang", 1) == doctest::Approx(0.5));
  CHECK(at("pos_neg_word_ratio", 0) == 3);
  CHECK(at("irr_count", 0) == 0);
  CHECK(f.values.cols() == 24);
}

TEST_CASE("user features equal naive tallies on a generated corpus") {
  SynthConfig cfg;
  cfg.user_count = 150;
  cfg.thread_count = 300;
  cfg.influencer_count = 6;
  cfg.chatty_count = 6;
  cfg.seed = 23;
  const auto gen = generate(cfg);
  const auto& lex = LexiconSet::builtin();
  const auto irr = irr_counts(gen.corpus, gen.truth.scores(), 0.5);
  const auto f = user_features(UserFeatureInputs{&gen.corpus, &lex, nullptr, &irr, nullptr});

  std::map<UserId, double> initial, replies, bytes, posts;
  std::map<UserId, std::set<ThreadId>> touched;
  std::map<UserId, std::set<std::int64_t>> days;
  for (const auto& t : gen.corpus.threads()) {
    for (const auto& p : t.posts()) {
      if (p.is_initial) initial[p.user_id] += 1;
      else if (p.user_id != t.posts()[0].user_id) replies[p.user_id] += 1;
      bytes[p.user_id] += static_cast<double>(p.body.size());
      posts[p.user_id] += 1;
      touched[p.user_id].insert(t.id());
      days[p.user_id].insert(p.timestamp / 86400);
    }
  }
  for (std::size_t i = 0; i < f.users.size(); ++i) {
    const auto& u = f.users[i];
    CHECK(f.column_values("initial_posts")[i] == initial[u]);
    CHECK(f.column_values("replies_to_others")[i] == replies[u]);
    CHECK(f.column_values("total_post_bytes")[i] == bytes[u]);
    CHECK(f.column_values("threads_touched")[i] == static_cast<double>(touched[u].size()));
    CHECK(f.column_values("active_days")[i] == static_cast<double>(days[u].size()));
    CHECK(f.column_values("irr_count")[i] == static_cast<double>(irr.counts.at(u)));
    for (std::size_t j = 0; j < f.values.cols(); ++j) CHECK(std::isfinite(f.values(i, j)));
  }
  std::ostringstream a, b;
  f.write_csv(a);
  user_features(UserFeatureInputs{&gen.corpus, &lex, nullptr, &irr, nullptr}).write_csv(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("feature table column helpers and cluster means") {
  FeatureTable t;
  t.feature_names = {"x", "y"};
  t.users = {"A", "B", "C"};
  t.values.append_row(std::vector<double>{1, 10});
  t.values.append_row(std::vector<double>{3, 20});
  t.values.append_row(std::vector<double>{5, 30});
  CHECK(t.without("x").feature_names == std::vector<std::string>{"y"});
  CHECK(t.with_column("z", {7, 8, 9}).column_values("z") == std::vector<double>{7, 8, 9});
  CHECK_THROWS_AS(t.column_values("nope"), Error);
  const auto aug = augment_with_clusters(t, {{"A", "k1"}, {"B", "k1"}});
  CHECK(aug.column_values("cluster_mean_x") == std::vector<double>{2, 2, 5});
  CHECK(aug.column_values("cluster_mean_y") == std::vector<double>{15, 15, 30});
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "user_id,x,y\nA,1,10\nB,3,20\nC,5,30\n");
}

TEST_CASE("logistic IU model separates on irr_count alone") {
  const auto p = planted_table(300, 1, true);
  const auto result = train_iu_base(p.table, p.labels, IuModelKind::Logistic);
  const auto y = label_vector(p.table.users, p.labels);
  double correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += (result.out_of_fold.values[i] > 0.5) == (y[i] == 1);
  CHECK(correct / static_cast<double>(y.size()) >= 0.95);
  CHECK(result.out_of_fold.source == "logistic");
}

TEST_CASE("IU base models predict the base rate on identical features") {
  FeatureTable t;
  t.feature_names = {"a", "b"};
  IuLabelSet labels;
  for (std::size_t i = 0; i < 50; ++i) {
    t.users.push_back(uid(i));
    t.values.append_row(std::vector<double>{1, 1});
    if (i < 10) labels.influential.insert(uid(i));
  }
  const std::vector<double> row = {1, 1};
  for (auto kind : {IuModelKind::NaiveBayes, IuModelKind::Logistic}) {
    const auto r = train_iu_base(t, labels, kind);
    CHECK(predict_iu(r.model, row) == doctest::Approx(0.2).epsilon(1e-6));
  }
  IuTrainOptions many;
  many.forest_trees = 400;
  const auto rf = train_iu_base(t, labels, IuModelKind::RandomForest, many);
  CHECK(std::abs(predict_iu(rf.model, row) - 0.2) < 0.03);
}

TEST_CASE("IU training errors") {
  const auto p = planted_table(40, 2, true);
  CHECK_THROWS_AS(train_iu_base(p.table, IuLabelSet{}, IuModelKind::Logistic), Error);
  IuLabelSet everyone;
  for (const auto& u : p.table.users) everyone.influential.insert(u);
  CHECK_THROWS_AS(train_iu_base(p.table, everyone, IuModelKind::NaiveBayes), Error);
  CHECK_THROWS_AS(parse_iu_model_kind("svm"), Error);
  CHECK(parse_iu_model_kind("random-forest") == IuModelKind::RandomForest);
}

TEST_CASE("IU training is deterministic under a seed") {
  const auto p = planted_table(120, 3, false);
  const auto a = train_iu_base(p.table, p.labels, IuModelKind::RandomForest);
  const auto b = train_iu_base(p.table, p.labels, IuModelKind::RandomForest);
  CHECK(a.out_of_fold.values == b.out_of_fold.values);
}

TEST_CASE("permuted labels give chance-level top-150 recall") {
  // Random ranking: hits ~ hypergeometric(N, |L|, K).
  const auto p = planted_table(500, 4, true);
  const double n = 500, l = static_cast<double>(p.labels.size()), k = 150;
  const double expected = k / n;
  const double sd = std::sqrt(k * (l / n) * (1 - l / n) * (n - k) / (n - 1)) / l;
  std::mt19937_64 rng(99);
  double total = 0;
  const int resamples = 100;
  for (int r = 0; r < resamples; ++r) {
    std::vector<UserId> users = p.table.users;
    std::shuffle(users.begin(), users.end(), rng);
    IuLabelSet permuted;
    for (std::size_t i = 0; i < p.labels.size(); ++i) permuted.influential.insert(users[i]);
    IuTrainOptions o;
    o.seed = static_cast<std::uint64_t>(r);
    const auto res = train_iu_base(p.table, permuted, IuModelKind::Logistic, o);
    total += topk_recall(ranking_of(res.out_of_fold), permuted, 150).value;
  }
  const double mean = total / resamples;
  CAPTURE(mean);
  CHECK(std::abs(mean - expected) <= 4 * sd / std::sqrt(static_cast<double>(resamples)));
}

TEST_CASE("ensemble of identical perfect bases is perfect") {
  const auto p = planted_table(200, 5, true);
  UserProbabilities perfect{"perfect", p.table.users, {}};
  for (const auto& u : p.table.users) perfect.values.push_back(p.labels.contains(u) ? 1.0 : 0.0);
  const auto r = train_iu_ensemble({perfect, perfect, perfect}, p.labels);
  const auto ranking = ranking_of(r.out_of_fold);
  CHECK(topk_recall(ranking, p.labels, p.labels.size()).value == 1.0);
  CHECK(r.out_of_fold.source == "ensemble");
}

TEST_CASE("ensemble keeps up with its one informative base") {
  const auto p = planted_table(400, 6, false);
  const auto informative = train_iu_base(p.table, p.labels, IuModelKind::Logistic).out_of_fold;
  std::mt19937_64 rng(6);
  UserProbabilities noise_a{"noise_a", p.table.users, {}}, noise_b{"noise_b", p.table.users, {}};
  for (std::size_t i = 0; i < p.table.users.size(); ++i) {
    noise_a.values.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    noise_b.values.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
  }
  const auto ens = train_iu_ensemble({informative, noise_a, noise_b}, p.labels);
  for (std::size_t k : {50u, 80u}) {
    const double base = topk_recall(ranking_of(informative), p.labels, k).value;
    const double combined = topk_recall(ranking_of(ens.out_of_fold), p.labels, k).value;
    CAPTURE(k);
    CHECK(combined >= base - 0.05);
  }
}

TEST_CASE("ensemble input validation") {
  const auto p = planted_table(60, 7, true);
  UserProbabilities a{"a", p.table.users, std::vector<double>(60, 0.5)};
  UserProbabilities b = a;
  b.users.pop_back();
  b.values.pop_back();
  CHECK_THROWS_AS(train_iu_ensemble({a, b}, p.labels), Error);
  CHECK_THROWS_AS(train_iu_ensemble({a}, p.labels), Error);
  std::vector<double> short_irr(10, 0.0);
  CHECK_THROWS_AS(train_iu_ensemble({a, a}, p.labels, {}, &short_irr), Error);
  std::vector<double> irr(60, 0.0);
  CHECK(train_iu_ensemble({a, a}, p.labels, {}, &irr).out_of_fold.source == "ensemble+irr");
}

TEST_CASE("evaluation report layout") {
  const auto ranking = ordered_ranking(10);
  auto labels = labels_at({{0, 2}});
  labels.provenance = "list";
  const auto report = evaluation_report({ranking}, labels, {1, 5});
  CHECK(report["labels"]["size"] == 2);
  CHECK(report["sources"][0]["source"] == "fixture");
  CHECK(report["sources"][0]["results"][0]["hits"] == 1);
  CHECK(report["sources"][0]["results"][1]["recall"] == 1.0);
  CHECK(report["sources"][0]["results"][1]["max_possible_precision"] == 0.4);
}
