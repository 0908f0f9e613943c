#pragma once

#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "irrkit/corpus.hpp"
#include "irrkit/scores.hpp"

namespace irrkit::test {

inline Post post(std::string id, std::string thread, std::string user, std::int64_t ts,
                 bool initial = false, std::string body = "") {
  Post p;
  p.post_id = std::move(id);
  p.thread_id = std::move(thread);
  p.user_id = std::move(user);
  p.timestamp = ts;
  p.is_initial = initial;
  p.body = std::move(body);
  return p;
}

// Groups posts by thread_id.
inline Corpus corpus_of(const std::vector<Post>& posts) {
  std::map<ThreadId, std::vector<Post>> by_thread;
  for (const auto& p : posts) by_thread[p.thread_id].push_back(p);
  std::vector<Thread> threads;
  for (auto& [id, ps] : by_thread) threads.emplace_back(id, std::move(ps));
  return Corpus(std::move(threads));
}

inline PostScores scores_of(std::initializer_list<std::pair<const char*, double>> values,
                            double threshold = 0.5) {
  PostScores s(threshold);
  for (const auto& [id, p] : values) s.set(id, p);
  return s;
}

inline std::string lines(std::initializer_list<const char*> ls) {
  std::string out;
  for (const char* l : ls) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace irrkit::test
