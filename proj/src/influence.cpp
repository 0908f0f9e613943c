#include "irrkit/influence.hpp"

#include <ostream>

#include "irrkit/io.hpp"

namespace irrkit {

namespace {

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "classification threshold must lie in (0,1)");
  }
}

}  // namespace

std::vector<IrrRecord> find_irrs(const Thread& thread, const PostScores& scores, double threshold) {
  check_threshold(threshold);
  std::vector<IrrRecord> out;
  const auto first_self = thread.first_self_reply_index();
  if (!first_self) return out;

  const auto& posts = thread.posts();
  const double initial = scores.posterior(posts.front().post_id);
  const double self = scores.posterior(posts[*first_self].post_id);
  if (self == initial) return out;
  const Polarity direction = self > initial ? Polarity::Positive : Polarity::Negative;

  // Responding replies are ordered, so those before s1 form a prefix.
  for (std::size_t i : thread.responding_replies()) {
    if (i >= *first_self) break;
    const double p = scores.posterior(posts[i].post_id);
    const bool aligned = direction == Polarity::Positive ? p > threshold : p < threshold;
    if (aligned) out.push_back({thread.id(), posts[i].post_id, posts[i].user_id, direction});
  }
  return out;
}

std::int64_t InfluenceCounts::total() const {
  std::int64_t sum = 0;
  for (const auto& [user, n] : counts) sum += n;
  return sum;
}

std::vector<double> InfluenceCounts::as_vector() const {
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& [user, n] : counts) out.push_back(static_cast<double>(n));
  return out;
}

std::vector<IrrRecord> all_irrs(const Corpus& corpus, const PostScores& scores, double threshold) {
  std::vector<IrrRecord> out;
  for (const Thread* t : eligible_threads(corpus)) {
    auto records = find_irrs(*t, scores, threshold);
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

InfluenceCounts irr_counts(const Corpus& corpus, const PostScores& scores, double threshold) {
  InfluenceCounts out;
  out.threshold = threshold;
  for (const auto& u : corpus.users()) out.counts.emplace_hint(out.counts.end(), u, 0);
  for (const auto& r : all_irrs(corpus, scores, threshold)) ++out.counts[r.responder];
  return out;
}

std::map<UserId, std::int64_t> early_reply_counts(const Corpus& corpus, double window_hours,
                                                  bool eligible_only) {
  std::map<UserId, std::int64_t> out;
  for (const auto& u : corpus.users()) out.emplace_hint(out.end(), u, 0);
  const double window_seconds = window_hours * 3600.0;
  for (const auto& thread : corpus.threads()) {
    if (eligible_only && !is_eligible(thread)) continue;
    const auto t0 = thread.initial_post().timestamp;
    for (std::size_t i : thread.responding_replies()) {
      const auto& post = thread.posts()[i];
      if (static_cast<double>(post.timestamp - t0) < window_seconds) ++out[post.user_id];
    }
  }
  return out;
}

SensitivityReport threshold_sensitivity(const Corpus& corpus, const PostScores& scores,
                                        const std::vector<double>& thresholds, double baseline) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");
  for (double t : thresholds) check_threshold(t);
  check_threshold(baseline);

  SensitivityReport report;
  report.thresholds = thresholds;
  std::vector<std::vector<double>> vectors;
  for (double t : thresholds) {
    report.counts.push_back(irr_counts(corpus, scores, t));
    vectors.push_back(report.counts.back().as_vector());
  }
  const std::size_t n = thresholds.size();
  report.matrix.assign(n, std::vector<SensitivityCell>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      report.matrix[a][b] = {thresholds[a], thresholds[b], try_pearson(vectors[a], vectors[b])};
    }
  }
  const auto base_vector = irr_counts(corpus, scores, baseline).as_vector();
  for (std::size_t b = 0; b < n; ++b) {
    report.against_baseline.push_back(
        {baseline, thresholds[b], try_pearson(base_vector, vectors[b])});
  }
  return report;
}

void write_irr_records(std::ostream& out, const std::vector<IrrRecord>& records, double threshold) {
  out << "thread_id,reply_post_id,responder,polarity,threshold\n";
  for (const auto& r : records) {
    out << io::csv_field(r.thread_id) << ',' << io::csv_field(r.reply_post_id) << ','
        << io::csv_field(r.responder) << ',' << polarity_name(r.polarity) << ','
        << io::format_real(threshold) << '\n';
  }
}

void write_counts(std::ostream& out, const std::map<UserId, std::int64_t>& counts,
                  const std::string& value_name) {
  out << "user_id," << value_name << '\n';
  for (const auto& [user, n] : counts) out << io::csv_field(user) << ',' << n << '\n';
}

}  // namespace irrkit
