#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "irrkit/corpus.hpp"
#include "irrkit/scores.hpp"
#include "irrkit/stats.hpp"

namespace irrkit {

// An influential responding reply.
struct IrrRecord {
  ThreadId thread_id;
  PostId reply_post_id;
  UserId responder;
  Polarity polarity = Polarity::Positive;

  friend bool operator==(const IrrRecord&, const IrrRecord&) = default;
};

// A responding reply r is an IRR iff it sits strictly between the initial
// post and the first self-reply (canonical post order), and its label at
// `threshold` points the same way the originator moved: posterior(r) >
// threshold when posterior(s1) > posterior(p0), posterior(r) < threshold when
// posterior(s1) < posterior(p0). Equal originator posteriors yield nothing.
std::vector<IrrRecord> find_irrs(const Thread& thread, const PostScores& scores, double threshold);

struct InfluenceCounts {
  double threshold = 0.5;
  std::map<UserId, std::int64_t> counts;  // every corpus user, zeros included

  std::int64_t total() const;
  std::vector<double> as_vector() const;  // in user order
};

InfluenceCounts irr_counts(const Corpus& corpus, const PostScores& scores, double threshold);

std::vector<IrrRecord> all_irrs(const Corpus& corpus, const PostScores& scores, double threshold);

// Responding replies posted strictly less than `window_hours` after the
// thread's initial post, per user.
std::map<UserId, std::int64_t> early_reply_counts(const Corpus& corpus, double window_hours = 24.0,
                                                  bool eligible_only = false);

struct SensitivityCell {
  double threshold_a = 0.0;
  double threshold_b = 0.0;
  std::optional<Correlation> correlation;  // nullopt when a vector is constant
};

struct SensitivityReport {
  std::vector<double> thresholds;
  std::vector<InfluenceCounts> counts;                 // one per threshold
  std::vector<std::vector<SensitivityCell>> matrix;    // thresholds x thresholds
  std::vector<SensitivityCell> against_baseline;       // 0.5 vs each threshold
};

inline const std::vector<double>& default_thresholds() {
  static const std::vector<double> t = {0.3, 0.4, 0.5, 0.6, 0.7};
  return t;
}

SensitivityReport threshold_sensitivity(const Corpus& corpus, const PostScores& scores,
                                        const std::vector<double>& thresholds,
                                        double baseline = 0.5);

void write_irr_records(std::ostream& out, const std::vector<IrrRecord>& records, double threshold);
void write_counts(std::ostream& out, const std::map<UserId, std::int64_t>& counts,
                  const std::string& value_name);

}  // namespace irrkit
