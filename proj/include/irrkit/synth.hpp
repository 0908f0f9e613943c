#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irrkit/corpus.hpp"
#include "irrkit/scores.hpp"

namespace irrkit {

struct SynthConfig {
  std::size_t user_count = 2000;
  std::size_t thread_count = 5000;
  std::size_t influencer_count = 40;

  // Heavy-tailed reply activity: log-normal weights, plus a block of chatty
  // users who reply a lot but late.
  std::size_t chatty_count = 60;
  double chatty_weight = 25.0;
  double activity_sigma = 1.0;
  double replies_per_thread = 3.0;  // ordinary responding replies, Poisson mean

  double influencer_reply_probability = 0.5;
  double second_influencer_probability = 0.2;
  double influencer_positive_probability = 0.85;

  double negative_start_probability = 0.6;
  double self_reply_probability = 0.7;
  double extra_self_replies_mean = 0.8;

  // Log-normal delays in hours from the initial post.
  double first_self_reply_median_hours = 17.0;
  double influencer_delay_median_hours = 4.0;
  double reply_delay_median_hours = 20.0;
  double chatty_delay_median_hours = 36.0;
  double delay_sigma = 0.8;

  // Initial posts and responding replies get planted posteriors in
  // [0.02, 0.5 - margin] or [0.5 + margin, 0.98].
  double sentiment_margin = 0.22;
  double sentiment_words_mean = 4.0;
  // Each sentiment word is positive with probability l^k / (l^k + (1-l)^k)
  // for planted posterior l and this k.
  double sentiment_sharpness = 3.0;

  // Added to the originator's next posterior per influencer reply before s1
  // (+ for a positive reply, - for a negative one).
  double influence_uplift = 0.15;
  double drift_noise = 0.1;

  double death_mention_probability = 0.13;
  std::size_t labeled_sample_size = 298;
  std::int64_t start_time = 1262304000;  // 2010-01-01T00:00:00Z
  std::uint64_t seed = 42;

  // Throws Error(Config).
  void validate() const;
};

nlohmann::json to_json(const SynthConfig& config);
// Unknown keys are rejected with Error(Config).
SynthConfig synth_config_from_json(const nlohmann::json& j);

struct ThreadDriver {
  ThreadId thread_id;
  bool negative_start = false;
  double drift = 0.0;  // planted shift of the originator's posterior
  std::vector<PostId> influencer_replies;
};

struct GroundTruth {
  std::set<UserId> influencers;
  std::set<UserId> chatty;
  std::map<PostId, double> planted_posterior;
  std::map<PostId, int> true_label;  // 1 positive, 0 negative
  std::vector<ThreadDriver> drivers;
  std::map<UserId, double> irr_propensity;  // expected planted drift per thread

  PostScores scores(double threshold = 0.5) const;
};

struct SynthOutput {
  Corpus corpus;
  GroundTruth truth;
  std::map<PostId, int> labeled_sample;  // post_id -> 1 positive / 0 negative
};

SynthOutput generate(const SynthConfig& config);

// Files: corpus.tsv, influencers.txt, post_labels.csv, labeled_sample.csv,
// thread_drivers.csv.
void write_synth_output(const std::string& dir, const SynthOutput& output);

// Independent literal scan used to check influence::irr_counts. Every corpus
// user appears, zeros included.
std::map<UserId, std::int64_t> oracle_irr_counts(const Corpus& corpus, const PostScores& scores,
                                                 double threshold);

// Pair-dependency sums by enumerating every shortest path. adjacency[a][b]
// marks an edge a -> b. At most 10 nodes.
std::vector<double> oracle_betweenness(const std::vector<std::vector<bool>>& adjacency);

}  // namespace irrkit
