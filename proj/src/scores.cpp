#include "irrkit/scores.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "irrkit/io.hpp"

namespace irrkit {

const char* polarity_name(Polarity p) noexcept {
  return p == Polarity::Positive ? "positive" : "negative";
}

void PostScores::set(const PostId& post_id, double posterior) {
  if (!(posterior >= 0.0 && posterior <= 1.0)) {
    throw Error(ErrorCode::Numeric, "posterior for " + post_id + " outside [0,1]");
  }
  posterior_[post_id] = posterior;
}

bool PostScores::contains(std::string_view post_id) const {
  return posterior_.count(std::string(post_id)) != 0;
}

double PostScores::posterior(std::string_view post_id) const {
  auto it = posterior_.find(std::string(post_id));
  if (it == posterior_.end()) {
    throw Error(ErrorCode::NotFound, "no sentiment score for post " + std::string(post_id));
  }
  return it->second;
}

Polarity PostScores::label(std::string_view post_id) const {
  return label_at(posterior(post_id), threshold_);
}

PostScore PostScores::score(std::string_view post_id) const {
  const double p = posterior(post_id);
  return {std::string(post_id), p, label_at(p, threshold_)};
}

std::vector<PostScore> PostScores::ordered(const Corpus& corpus) const {
  std::vector<PostScore> out;
  out.reserve(corpus.post_count());
  for (const auto& t : corpus.threads()) {
    for (const auto& p : t.posts()) out.push_back(score(p.post_id));
  }
  return out;
}

void write_scores(std::ostream& out, const Corpus& corpus, const PostScores& scores) {
  out << "post_id,posterior,label\n";
  for (const auto& s : scores.ordered(corpus)) {
    out << io::csv_field(s.post_id) << ',' << io::format_real(s.posterior) << ','
        << (s.label == Polarity::Positive ? "pos" : "neg") << '\n';
  }
}

void save_scores(const std::string& path, const Corpus& corpus, const PostScores& scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write scores file " + path);
  write_scores(out, corpus, scores);
}

PostScores read_scores(std::istream& in, double threshold) {
  PostScores scores(threshold);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = io::split_csv(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "post_id") continue;
    if (fields.size() < 2) {
      throw Error(ErrorCode::Parse, "scores line " + std::to_string(line_no) + ": too few fields");
    }
    const std::string& v = fields[1];
    const auto p = io::parse_real(v);
    if (!p) {
      throw Error(ErrorCode::Parse,
                  "scores line " + std::to_string(line_no) + ": bad posterior '" + v + "'");
    }
    scores.set(fields[0], *p);
  }
  return scores;
}

PostScores load_scores(const std::string& path, double threshold) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scores file " + path);
  return read_scores(in, threshold);
}

}  // namespace irrkit
