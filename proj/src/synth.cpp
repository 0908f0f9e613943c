#include "irrkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "irrkit/io.hpp"
#include "irrkit/sentiment.hpp"

namespace irrkit {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, "synth config: " + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SynthConfig::validate() const {
  require(user_count > 0, "user_count must be positive");
  require(thread_count > 0, "thread_count must be positive");
  require(influencer_count < user_count, "influencer_count must be below user_count");
  require(influencer_count + chatty_count < user_count,
          "influencer_count + chatty_count must be below user_count");
  for (auto [p, name] : {std::pair{influencer_reply_probability, "influencer_reply_probability"},
                         std::pair{second_influencer_probability, "second_influencer_probability"},
                         std::pair{influencer_positive_probability, "influencer_positive_probability"},
                         std::pair{negative_start_probability, "negative_start_probability"},
                         std::pair{self_reply_probability, "self_reply_probability"},
                         std::pair{death_mention_probability, "death_mention_probability"}}) {
    require(is_probability(p), std::string(name) + " must lie in [0,1]");
  }
  for (auto [v, name] : {std::pair{chatty_weight, "chatty_weight"},
                         std::pair{first_self_reply_median_hours, "first_self_reply_median_hours"},
                         std::pair{influencer_delay_median_hours, "influencer_delay_median_hours"},
                         std::pair{reply_delay_median_hours, "reply_delay_median_hours"},
                         std::pair{chatty_delay_median_hours, "chatty_delay_median_hours"},
                         std::pair{sentiment_words_mean, "sentiment_words_mean"},
                         std::pair{sentiment_sharpness, "sentiment_sharpness"}}) {
    require(v > 0.0 && std::isfinite(v), std::string(name) + " must be positive");
  }
  for (auto [v, name] : {std::pair{activity_sigma, "activity_sigma"},
                         std::pair{delay_sigma, "delay_sigma"},
                         std::pair{replies_per_thread, "replies_per_thread"},
                         std::pair{extra_self_replies_mean, "extra_self_replies_mean"},
                         std::pair{influence_uplift, "influence_uplift"},
                         std::pair{drift_noise, "drift_noise"}}) {
    require(v >= 0.0 && std::isfinite(v), std::string(name) + " must be non-negative");
  }
  require(sentiment_margin >= 0.0 && sentiment_margin < 0.48, "sentiment_margin must lie in [0,0.48)");
}

// --- config JSON ------------------------------------------------------------------

namespace {

template <class F>
void for_each_field(SynthConfig& c, F&& f) {
  f("user_count", c.user_count);
  f("thread_count", c.thread_count);
  f("influencer_count", c.influencer_count);
  f("chatty_count", c.chatty_count);
  f("chatty_weight", c.chatty_weight);
  f("activity_sigma", c.activity_sigma);
  f("replies_per_thread", c.replies_per_thread);
  f("influencer_reply_probability", c.influencer_reply_probability);
  f("second_influencer_probability", c.second_influencer_probability);
  f("influencer_positive_probability", c.influencer_positive_probability);
  f("negative_start_probability", c.negative_start_probability);
  f("self_reply_probability", c.self_reply_probability);
  f("extra_self_replies_mean", c.extra_self_replies_mean);
  f("first_self_reply_median_hours", c.first_self_reply_median_hours);
  f("influencer_delay_median_hours", c.influencer_delay_median_hours);
  f("reply_delay_median_hours", c.reply_delay_median_hours);
  f("chatty_delay_median_hours", c.chatty_delay_median_hours);
  f("delay_sigma", c.delay_sigma);
  f("sentiment_margin", c.sentiment_margin);
  f("sentiment_words_mean", c.sentiment_words_mean);
  f("sentiment_sharpness", c.sentiment_sharpness);
  f("influence_uplift", c.influence_uplift);
  f("drift_noise", c.drift_noise);
  f("death_mention_probability", c.death_mention_probability);
  f("labeled_sample_size", c.labeled_sample_size);
  f("start_time", c.start_time);
  f("seed", c.seed);
}

}  // namespace

nlohmann::json to_json(const SynthConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  SynthConfig copy = config;
  for_each_field(copy, [&](const char* name, auto& value) { j[name] = value; });
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "synth config must be a JSON object");
  SynthConfig c;
  std::set<std::string> known;
  for_each_field(c, [&](const char* name, auto& value) {
    known.insert(name);
    if (!j.contains(name)) return;
    try {
      j.at(name).get_to(value);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::Config, std::string("synth config: bad value for ") + name);
    }
  });
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::Config, "synth config: unknown key " + key);
  }
  c.validate();
  return c;
}

PostScores GroundTruth::scores(double threshold) const {
  PostScores out(threshold);
  for (const auto& [post, p] : planted_posterior) out.set(post, p);
  return out;
}

// --- generator ----------------------------------------------------------------

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int poisson(double mean) {
    return mean <= 0.0 ? 0 : std::poisson_distribution<int>(mean)(engine_);
  }
  double lognormal(double median, double sigma) { return median * std::exp(sigma * normal()); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.index(v.size())];
}

struct Vocabulary {
  std::vector<std::string> positive, negative, positive_emoticons, negative_emoticons, slang, boosters;
  std::vector<std::string> filler = {
      "the",   "a",     "doctor", "today",  "week",    "family", "treatment", "think",
      "about", "with",  "and",    "was",    "had",     "will",   "have",      "test",
      "results", "appointment", "night", "morning", "friend", "time", "went",  "back",
      "home",  "after", "some",   "more",   "told",    "me",     "my",        "it",
      "we",    "they",  "this",   "that",   "scan",    "nurse",  "chemo",     "surgery",
      "update", "news", "husband", "wife",  "daughter", "son",   "month",     "year"};
  std::vector<std::string> death = {"passed away", "funeral", "death", "memorial", "bereavement",
                                    "obituary"};
};

Vocabulary make_vocabulary() {
  const auto& lex = LexiconSet::builtin();
  Vocabulary v;
  v.positive.assign(lex.positive_terms.begin(), lex.positive_terms.end());
  v.negative.assign(lex.negative_terms.begin(), lex.negative_terms.end());
  v.positive_emoticons.assign(lex.positive_emoticons.begin(), lex.positive_emoticons.end());
  v.negative_emoticons.assign(lex.negative_emoticons.begin(), lex.negative_emoticons.end());
  v.slang.assign(lex.slang_terms.begin(), lex.slang_terms.end());
  for (const auto& [term, inc] : lex.booster_terms) v.boosters.push_back(term);
  return v;
}

std::string make_body(Rng& rng, double ell, bool death, const SynthConfig& config,
                      const Vocabulary& vocab, const std::vector<UserId>& users) {
  std::vector<std::string> words;
  const double a = std::pow(ell, config.sentiment_sharpness);
  const double b = std::pow(1.0 - ell, config.sentiment_sharpness);
  const double q = a / (a + b);
  const int sentiment_words = 1 + rng.poisson(config.sentiment_words_mean - 1.0 > 0 ? config.sentiment_words_mean - 1.0 : 0.0);
  for (int i = 0; i < sentiment_words; ++i) {
    const bool positive = rng.bernoulli(q);
    std::string w = positive ? pick(rng, vocab.positive) : pick(rng, vocab.negative);
    if (rng.bernoulli(0.15)) w = pick(rng, vocab.boosters) + " " + w;
    words.push_back(std::move(w));
  }
  const int fillers = 2 + rng.poisson(5.0);
  for (int i = 0; i < fillers; ++i) words.push_back(pick(rng, vocab.filler));
  if (rng.bernoulli(0.25)) {
    words.push_back(rng.bernoulli(q) ? pick(rng, vocab.positive_emoticons)
                                       : pick(rng, vocab.negative_emoticons));
  }
  if (rng.bernoulli(0.3)) words.push_back(pick(rng, vocab.slang));
  if (rng.bernoulli(0.15)) words.push_back("userid_" + pick(rng, users));
  std::shuffle(words.begin(), words.end(), rng.engine());
  if (death) words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.index(words.size() + 1)),
                          pick(rng, vocab.death));

  std::string body;
  std::size_t in_sentence = 0;
  const std::size_t sentence_len = 4 + rng.index(6);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!body.empty() && body.back() != '\n') body += ' ';
    body += words[i];
    ++in_sentence;
    if (in_sentence == sentence_len || i + 1 == words.size()) {
      const double r = rng.uniform();
      body += r < 0.1 ? "?" : r < 0.2 ? "!!" : r < 0.3 ? "!" : ".";
      in_sentence = 0;
    }
  }
  return body;
}

enum class Role { Initial, Self, Influencer, Ordinary };

struct Draft {
  std::int64_t timestamp = 0;
  std::size_t seq = 0;
  UserId user;
  Role role = Role::Ordinary;
  double ell = 0.5;
  int polarity = 0;  // influencer replies: +1 / -1
  bool death = false;
};

double band(Rng& rng, bool positive, double margin) {
  return positive ? rng.uniform(0.5 + margin, 0.98) : rng.uniform(0.02, 0.5 - margin);
}

std::int64_t to_seconds(double hours) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(hours * 3600.0)));
}

std::string format_id(const char* fmt, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, n);
  return buf;
}

}  // namespace

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Vocabulary vocab = make_vocabulary();

  std::vector<UserId> users(config.user_count);
  for (std::size_t i = 0; i < users.size(); ++i) users[i] = format_id("u%05zu", i);

  std::vector<std::size_t> order(users.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng.engine());

  GroundTruth truth;
  std::vector<UserId> influencers;
  for (std::size_t i = 0; i < config.influencer_count; ++i) influencers.push_back(users[order[i]]);
  truth.influencers.insert(influencers.begin(), influencers.end());
  std::vector<double> weight(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) weight[i] = std::exp(config.activity_sigma * rng.normal());
  for (std::size_t i = config.influencer_count; i < config.influencer_count + config.chatty_count; ++i) {
    weight[order[i]] *= config.chatty_weight;
    truth.chatty.insert(users[order[i]]);
  }
  std::discrete_distribution<std::size_t> responder_dist(weight.begin(), weight.end());

  const double per_thread_influence = config.influencer_count == 0
                                          ? 0.0
                                          : config.influence_uplift * config.influencer_reply_probability *
                                                (1.0 + config.second_influencer_probability) /
                                                static_cast<double>(config.influencer_count);
  for (const auto& u : users) {
    truth.irr_propensity[u] = truth.influencers.count(u) ? per_thread_influence : 0.0;
  }

  std::vector<Thread> threads;
  threads.reserve(config.thread_count);
  std::size_t next_post = 0;
  const double year_seconds = 365.0 * 86400.0;

  for (std::size_t t = 0; t < config.thread_count; ++t) {
    const ThreadId thread_id = format_id("t%06zu", t);
    const UserId originator = users[rng.index(users.size())];
    const std::int64_t t0 =
        config.start_time + static_cast<std::int64_t>(std::floor(rng.uniform() * year_seconds));
    const bool negative_start = rng.bernoulli(config.negative_start_probability);

    std::vector<Draft> drafts;
    std::size_t seq = 0;
    Draft initial;
    initial.timestamp = t0;
    initial.seq = seq++;
    initial.user = originator;
    initial.role = Role::Initial;
    initial.ell = band(rng, !negative_start, config.sentiment_margin);
    initial.death = negative_start && rng.bernoulli(config.death_mention_probability);
    drafts.push_back(initial);

    std::optional<std::int64_t> s1_time;
    if (rng.bernoulli(config.self_reply_probability)) {
      s1_time = t0 + to_seconds(rng.lognormal(config.first_self_reply_median_hours, config.delay_sigma));
    }

    if (!influencers.empty() && rng.bernoulli(config.influencer_reply_probability)) {
      std::vector<UserId> chosen;
      const std::size_t wanted = rng.bernoulli(config.second_influencer_probability) ? 2 : 1;
      for (int attempt = 0; attempt < 20 && chosen.size() < wanted; ++attempt) {
        const auto& u = pick(rng, influencers);
        if (u == originator || std::find(chosen.begin(), chosen.end(), u) != chosen.end()) continue;
        chosen.push_back(u);
      }
      for (const auto& u : chosen) {
        Draft d;
        d.timestamp = t0 + to_seconds(rng.lognormal(config.influencer_delay_median_hours, config.delay_sigma));
        d.seq = seq++;
        d.user = u;
        d.role = Role::Influencer;
        const bool positive = rng.bernoulli(config.influencer_positive_probability);
        d.polarity = positive ? 1 : -1;
        d.ell = band(rng, positive, config.sentiment_margin);
        drafts.push_back(std::move(d));
      }
    }

    const int ordinary = rng.poisson(config.replies_per_thread);
    for (int i = 0; i < ordinary; ++i) {
      std::size_t who = responder_dist(rng.engine());
      for (int attempt = 0; attempt < 20 && users[who] == originator; ++attempt) {
        who = responder_dist(rng.engine());
      }
      if (users[who] == originator) continue;
      Draft d;
      const bool chatty = truth.chatty.count(users[who]) != 0;
      d.timestamp = t0 + to_seconds(rng.lognormal(
                             chatty ? config.chatty_delay_median_hours : config.reply_delay_median_hours,
                             config.delay_sigma));
      d.seq = seq++;
      d.user = users[who];
      d.role = Role::Ordinary;
      d.ell = band(rng, rng.bernoulli(0.5), config.sentiment_margin);
      drafts.push_back(std::move(d));
    }

    ThreadDriver driver;
    driver.thread_id = thread_id;
    driver.negative_start = negative_start;

    if (s1_time) {
      Draft s1;
      s1.timestamp = *s1_time;
      s1.seq = seq++;
      s1.user = originator;
      s1.role = Role::Self;
      const auto before_s1 = [&](const Draft& d) {
        return d.timestamp < s1.timestamp || (d.timestamp == s1.timestamp && d.seq < s1.seq);
      };
      int net = 0;
      for (const auto& d : drafts) {
        if (d.role == Role::Influencer && before_s1(d)) net += d.polarity;
      }
      driver.drift = config.influence_uplift * net;
      // Symmetric noise with no clipping keeps the expected change at zero
      // when there is no drift.
      const double l0 = initial.ell;
      const double a = std::min({config.drift_noise, l0 - 0.005, 0.995 - l0});
      s1.ell = std::clamp(l0 + driver.drift + rng.uniform(-a, a), 0.005, 0.995);
      drafts.push_back(s1);

      const int extra = rng.poisson(config.extra_self_replies_mean);
      for (int i = 0; i < extra; ++i) {
        Draft d;
        d.timestamp = *s1_time + to_seconds(rng.lognormal(12.0, config.delay_sigma));
        d.seq = seq++;
        d.user = originator;
        d.role = Role::Self;
        const double b = std::min({0.05, s1.ell - 0.005, 0.995 - s1.ell});
        d.ell = s1.ell + rng.uniform(-b, b);
        drafts.push_back(std::move(d));
      }
    }

    std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.seq < b.seq;
    });

    std::vector<Post> posts;
    posts.reserve(drafts.size());
    for (const auto& d : drafts) {
      Post p;
      p.post_id = format_id("p%07zu", next_post++);
      p.thread_id = thread_id;
      p.user_id = d.user;
      p.timestamp = d.timestamp;
      p.is_initial = d.role == Role::Initial;
      p.body = make_body(rng, d.ell, d.death, config, vocab, users);
      truth.planted_posterior[p.post_id] = d.ell;
      truth.true_label[p.post_id] = d.ell > 0.5 ? 1 : 0;
      if (d.role == Role::Influencer) driver.influencer_replies.push_back(p.post_id);
      posts.push_back(std::move(p));
    }
    truth.drivers.push_back(std::move(driver));
    threads.emplace_back(thread_id, std::move(posts));
  }

  SynthOutput out{Corpus(std::move(threads)), std::move(truth), {}};

  std::vector<PostId> all_posts;
  all_posts.reserve(out.truth.true_label.size());
  for (const auto& [post, label] : out.truth.true_label) all_posts.push_back(post);
  const std::size_t sample = std::min(config.labeled_sample_size, all_posts.size());
  for (std::size_t i = 0; i < sample; ++i) {
    const std::size_t j = i + rng.index(all_posts.size() - i);
    std::swap(all_posts[i], all_posts[j]);
    out.labeled_sample[all_posts[i]] = out.truth.true_label.at(all_posts[i]);
  }
  return out;
}

void write_synth_output(const std::string& dir, const SynthOutput& output) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  save_corpus((root / "corpus.tsv").string(), output.corpus);

  std::ostringstream influencers;
  for (const auto& u : output.truth.influencers) influencers << u << '\n';
  io::write_file((root / "influencers.txt").string(), influencers.str());

  std::ostringstream labels;
  labels << "post_id,label,planted_posterior\n";
  for (const auto& [post, label] : output.truth.true_label) {
    labels << post << ',' << (label ? "pos" : "neg") << ','
           << io::format_real(output.truth.planted_posterior.at(post)) << '\n';
  }
  io::write_file((root / "post_labels.csv").string(), labels.str());

  std::ostringstream sample;
  sample << "post_id,label\n";
  for (const auto& [post, label] : output.labeled_sample) sample << post << ',' << (label ? "pos" : "neg") << '\n';
  io::write_file((root / "labeled_sample.csv").string(), sample.str());

  std::ostringstream drivers;
  drivers << "thread_id,negative_start,drift,influencer_replies\n";
  for (const auto& d : output.truth.drivers) {
    drivers << d.thread_id << ',' << (d.negative_start ? "true" : "false") << ','
            << io::format_real(d.drift) << ',';
    for (std::size_t i = 0; i < d.influencer_replies.size(); ++i) {
      drivers << (i ? ";" : "") << d.influencer_replies[i];
    }
    drivers << '\n';
  }
  io::write_file((root / "thread_drivers.csv").string(), drivers.str());
}

// --- oracles --------------------------------------------------------------------

std::map<UserId, std::int64_t> oracle_irr_counts(const Corpus& corpus, const PostScores& scores,
                                                 double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "classification threshold must lie in (0,1)");
  }
  std::map<UserId, std::int64_t> counts;
  for (const auto& u : corpus.users()) counts[u] = 0;

  for (const auto& thread : corpus.threads()) {
    std::vector<Post> posts = thread.posts();
    std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.post_id < b.post_id;
    });
    std::size_t p0 = posts.size();
    for (std::size_t i = 0; i < posts.size(); ++i) {
      if (posts[i].is_initial) {
        p0 = i;
        break;
      }
    }
    if (p0 == posts.size()) continue;
    const UserId& author = posts[p0].user_id;
    std::size_t s1 = posts.size();
    for (std::size_t i = p0 + 1; i < posts.size(); ++i) {
      if (posts[i].user_id == author) {
        s1 = i;
        break;
      }
    }
    if (s1 == posts.size()) continue;

    const double before = scores.posterior(posts[p0].post_id);
    const double after = scores.posterior(posts[s1].post_id);
    for (std::size_t j = p0 + 1; j < s1; ++j) {
      if (posts[j].user_id == author) continue;
      const double r = scores.posterior(posts[j].post_id);
      const bool condition_up = after > before && r > threshold;
      const bool condition_down = after < before && r < threshold;
      if (condition_up || condition_down) counts[posts[j].user_id] += 1;
    }
  }
  return counts;
}

namespace {

struct PathCounter {
  const std::vector<std::vector<bool>>& adj;
  std::size_t target = 0;
  std::size_t length = 0;
  std::vector<std::size_t> path;
  std::vector<bool> used;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> through;

  void walk(std::size_t v) {
    if (path.size() - 1 == length) {
      if (v != target) return;
      ++total;
      for (std::size_t i = 1; i + 1 < path.size(); ++i) ++through[path[i]];
      return;
    }
    for (std::size_t w = 0; w < adj.size(); ++w) {
      if (!adj[v][w] || used[w]) continue;
      used[w] = true;
      path.push_back(w);
      walk(w);
      path.pop_back();
      used[w] = false;
    }
  }
};

}  // namespace

std::vector<double> oracle_betweenness(const std::vector<std::vector<bool>>& adjacency) {
  const std::size_t n = adjacency.size();
  if (n > 10) throw Error(ErrorCode::InvalidArgument, "oracle_betweenness handles at most 10 nodes");
  for (const auto& row : adjacency) {
    if (row.size() != n) throw Error(ErrorCode::InvalidArgument, "adjacency matrix must be square");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      // Lengthen the walk until some simple path reaches t; those are the
      // shortest ones.
      for (std::size_t len = 1; len < n; ++len) {
        PathCounter pc{adjacency, t, len, {s}, std::vector<bool>(n, false), 0,
                       std::vector<std::uint64_t>(n, 0)};
        pc.used[s] = true;
        pc.walk(s);
        if (pc.total == 0) continue;
        for (std::size_t v = 0; v < n; ++v) {
          if (pc.through[v]) out[v] += static_cast<double>(pc.through[v]) / static_cast<double>(pc.total);
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace irrkit
