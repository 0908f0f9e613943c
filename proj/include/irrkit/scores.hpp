#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "irrkit/corpus.hpp"

namespace irrkit {

enum class Polarity { Negative, Positive };

const char* polarity_name(Polarity p) noexcept;

struct PostScore {
  PostId post_id;
  double posterior = 0.5;  // Pr(c = pos | p)
  Polarity label = Polarity::Negative;
};

// Strict threshold: positive iff posterior > threshold.
inline Polarity label_at(double posterior, double threshold) noexcept {
  return posterior > threshold ? Polarity::Positive : Polarity::Negative;
}

// Sentiment posteriors keyed by post_id.
class PostScores {
 public:
  PostScores() = default;
  explicit PostScores(double threshold) : threshold_(threshold) {}

  void set(const PostId& post_id, double posterior);
  bool contains(std::string_view post_id) const;
  // Throws Error(NotFound) naming the post when it has no score.
  double posterior(std::string_view post_id) const;
  Polarity label(std::string_view post_id) const;
  PostScore score(std::string_view post_id) const;

  double threshold() const noexcept { return threshold_; }
  std::size_t size() const noexcept { return posterior_.size(); }

  // Scores in corpus order (threads by id, posts by time).
  std::vector<PostScore> ordered(const Corpus& corpus) const;

 private:
  double threshold_ = 0.5;
  std::unordered_map<std::string, double> posterior_;
};

// CSV: post_id,posterior,label
void write_scores(std::ostream& out, const Corpus& corpus, const PostScores& scores);
void save_scores(const std::string& path, const Corpus& corpus, const PostScores& scores);
PostScores read_scores(std::istream& in, double threshold);
PostScores load_scores(const std::string& path, double threshold);

}  // namespace irrkit
