#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "irrkit/influence.hpp"
#include "irrkit/synth.hpp"
#include "support.hpp"

using namespace irrkit;
using irrkit::test::corpus_of;
using irrkit::test::post;
using irrkit::test::scores_of;

namespace {

Corpus irr_thread() {
  return corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10), post("s1", "t", "A", 20),
                    post("r2", "t", "C", 30)});
}

SynthOutput synth(std::size_t threads, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.user_count = 300;
  cfg.thread_count = threads;
  cfg.influencer_count = 10;
  cfg.chatty_count = 10;
  cfg.seed = seed;
  return generate(cfg);
}

// Planted posteriors with about a third replaced by uniform draws, so some
// posts land near every threshold.
PostScores jittered(const SynthOutput& gen, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PostScores s;
  for (const auto& [id, p] : gen.truth.planted_posterior) s.set(id, rng() % 3 == 0 ? u(rng) : p);
  return s;
}

}  // namespace

TEST_CASE("replies after the first self-reply are not influential") {
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10), post("s1", "t", "A", 20),
                      post("r2", "t", "B", 30)});
  auto irrs = find_irrs(c.threads()[0], scores_of({{"p0", 0.2}, {"r1", 0.9}, {"s1", 0.8}, {"r2", 0.9}}), 0.5);
  REQUIRE(irrs.size() == 1);
  CHECK(irrs[0].reply_post_id == "r1");
  CHECK(irrs[0].responder == "B");
  CHECK(irrs[0].polarity == Polarity::Positive);
}

TEST_CASE("reply polarity must follow the originator's direction") {
  auto c = irr_thread();
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.2}, {"r1", 0.3}, {"s1", 0.8}, {"r2", 0.9}}), 0.5).empty());

  auto neg = find_irrs(c.threads()[0], scores_of({{"p0", 0.8}, {"r1", 0.2}, {"s1", 0.3}, {"r2", 0.9}}), 0.5);
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].polarity == Polarity::Negative);
}

TEST_CASE("equal originator posteriors yield no IRRs") {
  auto c = irr_thread();
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.4}, {"r1", 0.9}, {"s1", 0.4}, {"r2", 0.9}}), 0.5).empty());
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.4}, {"r1", 0.1}, {"s1", 0.4}, {"r2", 0.9}}), 0.5).empty());
}

TEST_CASE("a reply exactly at the threshold is never influential") {
  auto c = irr_thread();
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.2}, {"r1", 0.5}, {"s1", 0.8}, {"r2", 0.9}}), 0.5).empty());
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.8}, {"r1", 0.5}, {"s1", 0.2}, {"r2", 0.9}}), 0.5).empty());
}

TEST_CASE("timestamp ties with the first self-reply follow post id order") {
  // r0 sorts before s1 at the same timestamp, z9 after it.
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r0", "t", "B", 20), post("s1", "t", "A", 20),
                      post("z9", "t", "C", 20)});
  auto irrs = find_irrs(c.threads()[0], scores_of({{"p0", 0.2}, {"r0", 0.9}, {"s1", 0.8}, {"z9", 0.9}}), 0.5);
  REQUIRE(irrs.size() == 1);
  CHECK(irrs[0].reply_post_id == "r0");
}

TEST_CASE("an ineligible thread has no IRRs and unscored posts are errors") {
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10)});
  CHECK(find_irrs(c.threads()[0], scores_of({{"p0", 0.2}, {"r1", 0.9}}), 0.5).empty());
  auto e = irr_thread();
  CHECK_THROWS_AS(find_irrs(e.threads()[0], scores_of({{"p0", 0.2}, {"s1", 0.8}}), 0.5), Error);
  CHECK_THROWS_AS(find_irrs(e.threads()[0], scores_of({{"p0", 0.2}, {"r1", 0.9}, {"s1", 0.8}, {"r2", 0.9}}), 1.0),
                  Error);
}

TEST_CASE("irr counts") {
  auto none = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10)});
  auto zero = irr_counts(none, scores_of({{"p0", 0.2}, {"r1", 0.9}}), 0.5);
  CHECK(zero.counts == std::map<UserId, std::int64_t>{{"A", 0}, {"B", 0}});
  CHECK(zero.total() == 0);

  auto c = irr_thread();
  auto one = irr_counts(c, scores_of({{"p0", 0.2}, {"r1", 0.9}, {"s1", 0.8}, {"r2", 0.9}}), 0.5);
  CHECK(one.counts == std::map<UserId, std::int64_t>{{"A", 0}, {"B", 1}, {"C", 0}});
  CHECK(one.as_vector() == std::vector<double>{0, 1, 0});
}

TEST_CASE("irr counts equal the literal-scan oracle on 2000 generated threads") {
  const auto gen = synth(2000, 5);
  const auto planted = gen.truth.scores();
  const auto noisy = jittered(gen, 6);
  for (double t : default_thresholds()) {
    CHECK(irr_counts(gen.corpus, planted, t).counts == oracle_irr_counts(gen.corpus, planted, t));
    CHECK(irr_counts(gen.corpus, noisy, t).counts == oracle_irr_counts(gen.corpus, noisy, t));
  }
}

TEST_CASE("every IRR re-checks against both conditions") {
  const auto gen = synth(600, 9);
  const auto scores = jittered(gen, 10);
  const auto records = all_irrs(gen.corpus, scores, 0.5);
  CHECK(static_cast<std::int64_t>(records.size()) == irr_counts(gen.corpus, scores, 0.5).total());
  for (const auto& r : records) {
    const Thread& t = *gen.corpus.find_thread(r.thread_id);
    const auto& p0 = t.posts()[0];
    const Post* s1 = nullptr;
    const Post* reply = nullptr;
    for (const auto& p : t.posts()) {
      if (!s1 && &p != &p0 && p.user_id == p0.user_id) s1 = &p;
      if (p.post_id == r.reply_post_id) reply = &p;
    }
    REQUIRE(s1);
    REQUIRE(reply);
    CHECK(reply->user_id != p0.user_id);
    CHECK(reply->user_id == r.responder);
    const auto before = [](const Post& a, const Post& b) {
      return a.timestamp < b.timestamp || (a.timestamp == b.timestamp && a.post_id < b.post_id);
    };
    CHECK(before(p0, *reply));
    CHECK(before(*reply, *s1));
    const double d = scores.posterior(s1->post_id) - scores.posterior(p0.post_id);
    const double pr = scores.posterior(reply->post_id);
    CHECK(((d > 0 && pr > 0.5) || (d < 0 && pr < 0.5)));
  }
}

TEST_CASE("removing a thread never increases a count") {
  const auto gen = synth(200, 12);
  const auto scores = gen.truth.scores();
  const auto full = irr_counts(gen.corpus, scores, 0.5);
  std::vector<Thread> fewer(gen.corpus.threads().begin() + 1, gen.corpus.threads().end());
  const Corpus smaller(std::move(fewer));
  const auto reduced = irr_counts(smaller, scores, 0.5);
  for (const auto& [user, n] : reduced.counts) CHECK(n <= full.counts.at(user));
}

TEST_CASE("irr counts do not depend on thread input order") {
  const auto gen = synth(150, 14);
  const auto scores = gen.truth.scores();
  std::vector<Thread> shuffled(gen.corpus.threads().begin(), gen.corpus.threads().end());
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Corpus again(std::move(shuffled));
  CHECK(irr_counts(again, scores, 0.5).counts == irr_counts(gen.corpus, scores, 0.5).counts);
}

TEST_CASE("early replies use a strict window") {
  auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 86040), post("r2", "t", "C", 86400),
                      post("r3", "t", "A", 100)});
  auto counts = early_reply_counts(c, 24.0);
  CHECK(counts.at("B") == 1);  // 23.9 h
  CHECK(counts.at("C") == 0);  // exactly 24 h
  CHECK(counts.at("A") == 0);  // self-replies are not responses
  CHECK(early_reply_counts(c, 24.0, true).at("B") == 1);
  auto open = corpus_of({post("q0", "q", "A", 0, true), post("q1", "q", "B", 10)});
  CHECK(early_reply_counts(open).at("B") == 1);
  CHECK(early_reply_counts(open, 24.0, true).at("B") == 0);
}

TEST_CASE("early replies equal a naive scan") {
  const auto gen = synth(500, 15);
  std::map<UserId, std::int64_t> expected;
  for (const auto& u : gen.corpus.users()) expected[u] = 0;
  for (const auto& t : gen.corpus.threads()) {
    for (const auto& p : t.posts()) {
      if (p.user_id != t.posts()[0].user_id && p.timestamp - t.posts()[0].timestamp < 24 * 3600) ++expected[p.user_id];
    }
  }
  CHECK(early_reply_counts(gen.corpus) == expected);
}

TEST_CASE("threshold sensitivity") {
  SUBCASE("no posterior inside (0.3, 0.7) gives identical counts") {
    const auto gen = synth(800, 16);
    PostScores extreme;
    for (const auto& [id, p] : gen.truth.planted_posterior) extreme.set(id, p > 0.5 ? 0.9 : 0.1);
    const auto rep = threshold_sensitivity(gen.corpus, extreme, default_thresholds());
    REQUIRE(rep.matrix.size() == 5);
    for (const auto& row : rep.matrix) {
      for (const auto& cell : row) {
        REQUIRE(cell.correlation);
        CHECK(cell.correlation->r == 1.0);
      }
    }
    for (const auto& cell : rep.against_baseline) CHECK(cell.correlation->r == 1.0);
  }
  SUBCASE("single threshold") {
    const auto gen = synth(100, 17);
    const auto rep = threshold_sensitivity(gen.corpus, gen.truth.scores(), {0.5});
    REQUIRE(rep.matrix.size() == 1);
    REQUIRE(rep.matrix[0].size() == 1);
    REQUIRE(rep.matrix[0][0].correlation);
    CHECK(rep.matrix[0][0].correlation->r == 1.0);
  }
  SUBCASE("constant counts are flagged undefined") {
    auto c = corpus_of({post("p0", "t", "A", 0, true), post("r1", "t", "B", 10)});
    const auto rep = threshold_sensitivity(c, scores_of({{"p0", 0.2}, {"r1", 0.9}}), {0.4, 0.5});
    CHECK_FALSE(rep.matrix[0][1].correlation);
  }
  SUBCASE("bad thresholds") {
    auto c = irr_thread();
    CHECK_THROWS_AS(threshold_sensitivity(c, PostScores{}, {}), Error);
    CHECK_THROWS_AS(threshold_sensitivity(c, PostScores{}, {0.0}), Error);
  }
}

TEST_CASE("record and count CSV output") {
  std::ostringstream out;
  write_irr_records(out, {IrrRecord{"t", "r1", "B", Polarity::Positive}}, 0.5);
  CHECK(out.str().find("t,r1,B,positive,0.5") != std::string::npos);
  std::ostringstream counts;
  write_counts(counts, {{"A", 0}, {"B", 2}}, "irr_count");
  CHECK(counts.str() == "user_id,irr_count\nA,0\nB,2\n");
}
