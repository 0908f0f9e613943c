#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "irrkit/error.hpp"

namespace irrkit {

using UserId = std::string;
using PostId = std::string;
using ThreadId = std::string;

struct Post {
  PostId post_id;
  ThreadId thread_id;
  UserId user_id;
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  std::string body;
  bool is_initial = false;

  friend bool operator==(const Post&, const Post&) = default;
};

// Canonical order inside a thread: timestamp, then post_id.
bool post_order_less(const Post& a, const Post& b) noexcept;

class Thread {
 public:
  Thread(ThreadId id, std::vector<Post> posts);

  const ThreadId& id() const noexcept { return id_; }
  const UserId& originator() const noexcept { return posts_.front().user_id; }
  const std::vector<Post>& posts() const noexcept { return posts_; }
  const Post& initial_post() const noexcept { return posts_.front(); }

  // Indices into posts().
  const std::vector<std::size_t>& responding_replies() const noexcept { return responding_; }
  const std::vector<std::size_t>& self_replies() const noexcept { return self_; }

  // Position of the first self-reply in posts(), if any.
  std::optional<std::size_t> first_self_reply_index() const noexcept;

 private:
  ThreadId id_;
  std::vector<Post> posts_;
  std::vector<std::size_t> responding_;
  std::vector<std::size_t> self_;
};

std::optional<Post> first_self_reply(const Thread& thread);

struct PostLocation {
  std::size_t thread = 0;
  std::size_t position = 0;
};

// Immutable after construction. Threads are sorted by thread_id.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Thread> threads);

  const std::vector<Thread>& threads() const noexcept { return threads_; }
  const std::vector<UserId>& users() const noexcept { return users_; }
  std::size_t post_count() const noexcept { return post_count_; }
  std::size_t thread_count() const noexcept { return threads_.size(); }

  const Post* find_post(std::string_view post_id) const;
  std::optional<PostLocation> locate(std::string_view post_id) const;
  const Thread* find_thread(std::string_view thread_id) const;

  friend bool operator==(const Corpus& a, const Corpus& b);

 private:
  std::vector<Thread> threads_;
  std::vector<UserId> users_;
  std::size_t post_count_ = 0;
  std::unordered_map<std::string, PostLocation> index_;
};

// Threads with at least one responding reply and one self-reply, by thread_id.
std::vector<const Thread*> eligible_threads(const Corpus& corpus);
bool is_eligible(const Thread& thread) noexcept;

enum class IngestIssue {
  MalformedLine,
  BadTimestamp,
  DuplicatePostId,
  NoInitialPost,
  MultipleInitialPosts,
  InitialNotEarliest,
};

const char* ingest_issue_name(IngestIssue issue) noexcept;

struct ValidationReport {
  std::size_t records_read = 0;
  std::size_t records_accepted = 0;
  std::size_t records_rejected = 0;
  std::map<IngestIssue, std::size_t> issue_counts;
  std::vector<std::string> messages;

  bool ok() const noexcept { return records_rejected == 0; }
  std::string to_text() const;
};

class IngestError : public Error {
 public:
  explicit IngestError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

struct IngestResult {
  std::optional<Corpus> corpus;  // set only when the report is clean
  ValidationReport report;
};

// Record format (one per line, tab separated):
//   post_id  thread_id  user_id  timestamp  is_initial  body
// is_initial is "true", "false" or empty (unknown). Body escapes: \\ \t \n \r.
// Blank lines and lines starting with '#' are skipped.
IngestResult ingest_corpus(std::istream& in);
Corpus parse_corpus(std::istream& in);  // throws IngestError
Corpus load_corpus(const std::string& path);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::string& path, const Corpus& corpus);

std::string escape_body(std::string_view body);
std::string unescape_body(std::string_view field);

}  // namespace irrkit
