#include "irrkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "irrkit/io.hpp"

namespace irrkit {

ThreadSentiment thread_sentiment(const Thread& thread, const PostScores& scores) {
  if (!is_eligible(thread)) {
    throw Error(ErrorCode::InvalidArgument,
                "thread " + thread.id() + " is not eligible (needs a response and a self-reply)");
  }
  const auto& posts = thread.posts();
  ThreadSentiment ts;
  ts.thread_id = thread.id();
  ts.initial = scores.posterior(thread.initial_post().post_id);
  double sum = 0.0;
  for (std::size_t i : thread.self_replies()) sum += scores.posterior(posts[i].post_id);
  ts.self_replies = thread.self_replies().size();
  ts.self_mean = sum / static_cast<double>(ts.self_replies);
  sum = 0.0;
  for (std::size_t i : thread.responding_replies()) sum += scores.posterior(posts[i].post_id);
  ts.responses = thread.responding_replies().size();
  ts.response_mean = sum / static_cast<double>(ts.responses);
  ts.delta = ts.self_mean - ts.initial;
  return ts;
}

std::vector<ThreadSentiment> eligible_thread_sentiments(const Corpus& corpus,
                                                        const PostScores& scores) {
  std::vector<ThreadSentiment> out;
  for (const Thread* t : eligible_threads(corpus)) out.push_back(thread_sentiment(*t, scores));
  return out;
}

void SeriesTable::write_csv(std::ostream& out) const {
  out << "# " << name << '\n';
  out << x_label << ',' << y_label;
  if (!counts.empty()) out << ",count";
  out << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << io::format_real(x[i]) << ',' << io::format_real(y[i]);
    if (!counts.empty()) out << ',' << counts[i];
    out << '\n';
  }
}

SeriesTable sentiment_by_position(const Corpus& corpus, const PostScores& scores) {
  std::vector<double> sum;
  std::vector<std::size_t> count;
  for (const auto& thread : corpus.threads()) {
    std::size_t n = 0;
    for (const auto& post : thread.posts()) {
      if (post.user_id != thread.originator()) continue;
      if (sum.size() <= n) {
        sum.push_back(0.0);
        count.push_back(0);
      }
      sum[n] += scores.posterior(post.post_id);
      ++count[n];
      ++n;
    }
  }
  SeriesTable s;
  s.name = "originator sentiment by post position (originator posts in own threads)";
  s.x_label = "position";
  s.y_label = "mean_posterior";
  for (std::size_t n = 0; n < sum.size(); ++n) {
    if (count[n] == 0) continue;
    s.x.push_back(static_cast<double>(n + 1));
    s.y.push_back(sum[n] / static_cast<double>(count[n]));
    s.counts.push_back(count[n]);
  }
  return s;
}

ReplySentimentBins delta_vs_reply_sentiment(const Corpus& corpus, const PostScores& scores,
                                            int bin_count) {
  if (bin_count < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 2");
  const auto threads = eligible_thread_sentiments(corpus, scores);
  const auto bins = static_cast<std::size_t>(bin_count);
  std::vector<double> sr_sum(bins, 0.0), delta_sum(bins, 0.0);
  ReplySentimentBins out;
  out.bin_counts.assign(bins, 0);
  std::vector<double> all_sr, all_delta;
  for (const auto& t : threads) {
    auto b = static_cast<std::size_t>(std::floor(t.response_mean * static_cast<double>(bins)));
    b = std::min(b, bins - 1);
    sr_sum[b] += t.response_mean;
    delta_sum[b] += t.delta;
    ++out.bin_counts[b];
    all_sr.push_back(t.response_mean);
    all_delta.push_back(t.delta);
  }
  out.series.name = "originator sentiment change vs mean responding-reply sentiment";
  out.series.x_label = "mean_reply_posterior";
  out.series.y_label = "mean_delta";
  for (std::size_t b = 0; b < bins; ++b) {
    if (out.bin_counts[b] == 0) continue;
    const double n = static_cast<double>(out.bin_counts[b]);
    out.series.x.push_back(sr_sum[b] / n);
    out.series.y.push_back(delta_sum[b] / n);
    out.series.counts.push_back(out.bin_counts[b]);
  }
  out.bin_correlation = try_pearson(out.series.x, out.series.y);
  out.thread_correlation = try_pearson(all_sr, all_delta);
  return out;
}

NegativeStartStats delta_histogram_negative_start(const Corpus& corpus, const PostScores& scores,
                                                  double threshold, int bin_count) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0,1)");
  }
  if (bin_count < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 2");
  NegativeStartStats out;
  for (const auto& t : eligible_thread_sentiments(corpus, scores)) {
    if (label_at(t.initial, threshold) == Polarity::Negative) out.deltas.push_back(t.delta);
  }
  const auto bins = static_cast<std::size_t>(bin_count);
  const double width = 2.0 / static_cast<double>(bins);
  out.histogram.name = "distribution of originator sentiment change, negative-start threads";
  out.histogram.x_label = "delta_bin_center";
  out.histogram.y_label = "fraction";
  std::vector<std::size_t> counts(bins, 0);
  for (double d : out.deltas) {
    auto b = static_cast<std::size_t>(std::floor((d + 1.0) / width));
    ++counts[std::min(b, bins - 1)];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out.histogram.x.push_back(-1.0 + (static_cast<double>(b) + 0.5) * width);
    out.histogram.y.push_back(out.deltas.empty() ? 0.0
                                                 : static_cast<double>(counts[b]) /
                                                       static_cast<double>(out.deltas.size()));
    out.histogram.counts.push_back(counts[b]);
  }
  if (out.deltas.empty()) return out;
  out.defined = true;
  out.mean = mean(out.deltas);
  const auto negatives = std::count_if(out.deltas.begin(), out.deltas.end(),
                                       [](double d) { return d < 0.0; });
  out.frac_negative = static_cast<double>(negatives) / static_cast<double>(out.deltas.size());
  out.t_test = t_test_greater_than_zero(out.deltas);
  return out;
}

TransitionRates transition_rates(const Corpus& corpus, const PostScores& scores, double threshold) {
  TransitionRates out;
  std::size_t turned = 0, stayed = 0;
  for (const auto& t : eligible_thread_sentiments(corpus, scores)) {
    const bool positive_after = t.self_mean > threshold;
    if (label_at(t.initial, threshold) == Polarity::Negative) {
      ++out.negative_starts;
      if (positive_after) ++turned;
    } else {
      ++out.positive_starts;
      if (positive_after) ++stayed;
    }
  }
  if (out.negative_starts > 0) {
    out.neg_start_turned_pos =
        static_cast<double>(turned) / static_cast<double>(out.negative_starts);
  }
  if (out.positive_starts > 0) {
    out.pos_start_stayed_pos =
        static_cast<double>(stayed) / static_cast<double>(out.positive_starts);
  }
  return out;
}

SeriesTable empirical_cdf(std::vector<double> values, std::string name) {
  SeriesTable s;
  s.name = std::move(name);
  s.x_label = "hours";
  s.y_label = "cumulative_fraction";
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    s.x.push_back(values[i]);
    s.y.push_back(static_cast<double>(i + 1) / n);
  }
  return s;
}

IntervalCdf interval_cdf(const Corpus& corpus) {
  std::vector<double> first, last;
  for (const auto& thread : corpus.threads()) {
    if (thread.self_replies().empty()) continue;
    const auto& posts = thread.posts();
    const double t0 = static_cast<double>(thread.initial_post().timestamp);
    first.push_back((static_cast<double>(posts[thread.self_replies().front()].timestamp) - t0) /
                    3600.0);
    last.push_back((static_cast<double>(posts[thread.self_replies().back()].timestamp) - t0) /
                   3600.0);
  }
  IntervalCdf out;
  if (!first.empty()) {
    out.median_first_hours = median(first);
    out.fraction_first_below_24h =
        static_cast<double>(std::count_if(first.begin(), first.end(),
                                          [](double h) { return h < 24.0; })) /
        static_cast<double>(first.size());
  }
  out.first = empirical_cdf(std::move(first), "interval from initial post to first self-reply");
  out.last = empirical_cdf(std::move(last), "interval from initial post to last self-reply");
  return out;
}

}  // namespace irrkit
