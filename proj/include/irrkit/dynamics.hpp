#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irrkit/corpus.hpp"
#include "irrkit/scores.hpp"
#include "irrkit/stats.hpp"

namespace irrkit {

struct ThreadSentiment {
  ThreadId thread_id;
  double initial = 0.0;        // S0
  double self_mean = 0.0;      // SF
  double response_mean = 0.0;  // SR
  double delta = 0.0;          // SF - S0
  std::size_t self_replies = 0;
  std::size_t responses = 0;
};

// Requires an eligible thread; throws Error(NotFound) naming any unscored post.
ThreadSentiment thread_sentiment(const Thread& thread, const PostScores& scores);

std::vector<ThreadSentiment> eligible_thread_sentiments(const Corpus& corpus,
                                                        const PostScores& scores);

struct SeriesTable {
  std::string name;
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> counts;  // empty when the series has no bins

  void write_csv(std::ostream& out) const;
};

// Mean posterior of originators' n-th post in their own threads (n = 1 is the
// initial post). Uses every thread; positions without observations are omitted.
SeriesTable sentiment_by_position(const Corpus& corpus, const PostScores& scores);

struct ReplySentimentBins {
  SeriesTable series;                           // x = mean SR in bin, y = mean delta
  std::vector<std::size_t> bin_counts;          // all bins, including empty ones
  std::optional<Correlation> bin_correlation;   // over non-empty bin means
  std::optional<Correlation> thread_correlation;
};

ReplySentimentBins delta_vs_reply_sentiment(const Corpus& corpus, const PostScores& scores,
                                            int bin_count = 20);

struct NegativeStartStats {
  SeriesTable histogram;  // delta over [-1, 1]
  std::vector<double> deltas;
  bool defined = false;   // false when no thread qualifies
  double mean = 0.0;
  double frac_negative = 0.0;
  OneSampleTTest t_test;
};

NegativeStartStats delta_histogram_negative_start(const Corpus& corpus, const PostScores& scores,
                                                  double threshold, int bin_count = 20);

struct TransitionRates {
  std::optional<double> neg_start_turned_pos;
  std::optional<double> pos_start_stayed_pos;
  std::size_t negative_starts = 0;
  std::size_t positive_starts = 0;
};

TransitionRates transition_rates(const Corpus& corpus, const PostScores& scores, double threshold);

struct IntervalCdf {
  SeriesTable first;  // hours from initial post to first self-reply
  SeriesTable last;   // hours to last self-reply
  std::optional<double> median_first_hours;
  double fraction_first_below_24h = 0.0;
};

IntervalCdf interval_cdf(const Corpus& corpus);

// Empirical CDF: x = sorted distinct values, y = fraction <= x.
SeriesTable empirical_cdf(std::vector<double> values, std::string name);

}  // namespace irrkit
