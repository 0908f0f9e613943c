#include "irrkit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace irrkit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Config: return "config";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

bool post_order_less(const Post& a, const Post& b) noexcept {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.post_id < b.post_id;
}

Thread::Thread(ThreadId id, std::vector<Post> posts)
    : id_(std::move(id)), posts_(std::move(posts)) {
  if (posts_.empty()) {
    throw Error(ErrorCode::Validation, "thread " + id_ + " has no posts");
  }
  std::sort(posts_.begin(), posts_.end(), post_order_less);
  if (!posts_.front().is_initial) {
    throw Error(ErrorCode::Validation,
                "thread " + id_ + ": earliest post is not marked initial");
  }
  const UserId& origin = posts_.front().user_id;
  for (std::size_t i = 1; i < posts_.size(); ++i) {
    if (posts_[i].is_initial) {
      throw Error(ErrorCode::Validation,
                  "thread " + id_ + ": more than one initial post");
    }
    if (posts_[i].user_id == origin) {
      self_.push_back(i);
    } else {
      responding_.push_back(i);
    }
  }
}

std::optional<std::size_t> Thread::first_self_reply_index() const noexcept {
  if (self_.empty()) return std::nullopt;
  return self_.front();
}

std::optional<Post> first_self_reply(const Thread& thread) {
  if (auto idx = thread.first_self_reply_index()) return thread.posts()[*idx];
  return std::nullopt;
}

Corpus::Corpus(std::vector<Thread> threads) : threads_(std::move(threads)) {
  std::sort(threads_.begin(), threads_.end(),
            [](const Thread& a, const Thread& b) { return a.id() < b.id(); });
  std::set<UserId> users;
  for (std::size_t t = 0; t < threads_.size(); ++t) {
    if (t > 0 && threads_[t].id() == threads_[t - 1].id()) {
      throw Error(ErrorCode::Validation, "duplicate thread id " + threads_[t].id());
    }
    const auto& posts = threads_[t].posts();
    for (std::size_t p = 0; p < posts.size(); ++p) {
      if (posts[p].thread_id != threads_[t].id()) {
        throw Error(ErrorCode::Validation,
                    "post " + posts[p].post_id + " filed under wrong thread");
      }
      auto [it, inserted] = index_.emplace(posts[p].post_id, PostLocation{t, p});
      if (!inserted) {
        throw Error(ErrorCode::Validation, "duplicate post_id " + posts[p].post_id);
      }
      users.insert(posts[p].user_id);
      ++post_count_;
    }
  }
  users_.assign(users.begin(), users.end());
}

const Post* Corpus::find_post(std::string_view post_id) const {
  auto loc = locate(post_id);
  if (!loc) return nullptr;
  return &threads_[loc->thread].posts()[loc->position];
}

std::optional<PostLocation> Corpus::locate(std::string_view post_id) const {
  auto it = index_.find(std::string(post_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Thread* Corpus::find_thread(std::string_view thread_id) const {
  auto it = std::lower_bound(
      threads_.begin(), threads_.end(), thread_id,
      [](const Thread& t, std::string_view id) { return t.id() < id; });
  if (it == threads_.end() || it->id() != thread_id) return nullptr;
  return &*it;
}

bool operator==(const Corpus& a, const Corpus& b) {
  if (a.threads_.size() != b.threads_.size()) return false;
  for (std::size_t i = 0; i < a.threads_.size(); ++i) {
    if (a.threads_[i].id() != b.threads_[i].id()) return false;
    if (a.threads_[i].posts() != b.threads_[i].posts()) return false;
  }
  return true;
}

bool is_eligible(const Thread& thread) noexcept {
  return !thread.responding_replies().empty() && !thread.self_replies().empty();
}

std::vector<const Thread*> eligible_threads(const Corpus& corpus) {
  std::vector<const Thread*> out;
  for (const auto& t : corpus.threads()) {
    if (is_eligible(t)) out.push_back(&t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

const char* ingest_issue_name(IngestIssue issue) noexcept {
  switch (issue) {
    case IngestIssue::MalformedLine: return "malformed_line";
    case IngestIssue::BadTimestamp: return "bad_timestamp";
    case IngestIssue::DuplicatePostId: return "duplicate_post_id";
    case IngestIssue::NoInitialPost: return "no_initial_post";
    case IngestIssue::MultipleInitialPosts: return "multiple_initial_posts";
    case IngestIssue::InitialNotEarliest: return "initial_not_earliest";
  }
  return "unknown";
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  out << "status: " << (ok() ? "ok" : "rejected") << '\n';
  out << "records_read: " << records_read << '\n';
  out << "records_accepted: " << records_accepted << '\n';
  out << "records_rejected: " << records_rejected << '\n';
  for (const auto& [issue, count] : issue_counts) {
    out << ingest_issue_name(issue) << ": " << count << '\n';
  }
  for (const auto& m : messages) out << "error: " << m << '\n';
  return out.str();
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::string msg = "corpus ingestion failed: " +
                    std::to_string(report.records_rejected) + " record(s) rejected";
  if (!report.messages.empty()) msg += " (first: " + report.messages.front() + ")";
  return msg;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

enum class InitialFlag { Unknown, Yes, No };

struct PendingPost {
  Post post;
  InitialFlag flag = InitialFlag::Unknown;
  std::size_t line = 0;
};

}  // namespace

IngestError::IngestError(ValidationReport report)
    : Error(ErrorCode::Validation, summarize(report)), report_(std::move(report)) {}

std::string escape_body(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  for (char c : body) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_body(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (c != '\\' || i + 1 == field.size()) {
      out += c;
      continue;
    }
    char n = field[++i];
    switch (n) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += n;
    }
  }
  return out;
}

IngestResult ingest_corpus(std::istream& in) {
  IngestResult result;
  ValidationReport& report = result.report;
  auto reject = [&](IngestIssue issue, std::string msg, std::size_t n = 1) {
    report.issue_counts[issue] += n;
    report.records_rejected += n;
    report.messages.push_back(std::move(msg));
  };

  std::map<ThreadId, std::vector<PendingPost>> by_thread;
  std::unordered_set<PostId> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ++report.records_read;
    const std::string where = "line " + std::to_string(line_no);

    auto fields = split_tabs(line);
    if (fields.size() != 6 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      reject(IngestIssue::MalformedLine, where + ": expected 6 tab-separated fields");
      continue;
    }
    PendingPost pending;
    pending.line = line_no;
    Post& post = pending.post;
    post.post_id = std::string(fields[0]);
    post.thread_id = std::string(fields[1]);
    post.user_id = std::string(fields[2]);

    auto ts = fields[3];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), post.timestamp);
    if (ts.empty() || ec != std::errc() || ptr != ts.data() + ts.size()) {
      reject(IngestIssue::BadTimestamp,
             where + ": timestamp '" + std::string(ts) + "' is not an integer");
      continue;
    }
    if (fields[4] == "true") {
      pending.flag = InitialFlag::Yes;
    } else if (fields[4] == "false") {
      pending.flag = InitialFlag::No;
    } else if (!fields[4].empty()) {
      reject(IngestIssue::MalformedLine,
             where + ": is_initial must be true, false or empty");
      continue;
    }
    post.body = unescape_body(fields[5]);

    if (!seen.insert(post.post_id).second) {
      reject(IngestIssue::DuplicatePostId, where + ": duplicate post_id " + post.post_id);
      continue;
    }
    by_thread[post.thread_id].push_back(std::move(pending));
  }

  std::vector<Thread> threads;
  for (auto& [thread_id, pending] : by_thread) {
    std::sort(pending.begin(), pending.end(),
              [](const PendingPost& a, const PendingPost& b) {
                return post_order_less(a.post, b.post);
              });
    auto flagged = std::count_if(pending.begin(), pending.end(), [](const PendingPost& p) {
      return p.flag == InitialFlag::Yes;
    });
    const std::string where = "thread " + thread_id;
    if (flagged > 1) {
      reject(IngestIssue::MultipleInitialPosts, where + ": multiple initial posts",
             pending.size());
      continue;
    }
    if (flagged == 1 && pending.front().flag != InitialFlag::Yes) {
      reject(IngestIssue::InitialNotEarliest,
             where + ": initial post is not the earliest post", pending.size());
      continue;
    }
    if (flagged == 0 && pending.front().flag != InitialFlag::Unknown) {
      reject(IngestIssue::NoInitialPost, where + ": no initial post", pending.size());
      continue;
    }
    std::vector<Post> posts;
    posts.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
      pending[i].post.is_initial = (i == 0);
      posts.push_back(std::move(pending[i].post));
    }
    report.records_accepted += posts.size();
    threads.emplace_back(thread_id, std::move(posts));
  }

  if (report.ok()) result.corpus.emplace(std::move(threads));
  return result;
}

Corpus parse_corpus(std::istream& in) {
  auto result = ingest_corpus(in);
  if (!result.corpus) throw IngestError(std::move(result.report));
  return std::move(*result.corpus);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus file " + path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& thread : corpus.threads()) {
    for (const auto& p : thread.posts()) {
      out << p.post_id << '\t' << p.thread_id << '\t' << p.user_id << '\t'
          << p.timestamp << '\t' << (p.is_initial ? "true" : "false") << '\t'
          << escape_body(p.body) << '\n';
    }
  }
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write corpus file " + path);
  write_corpus(out, corpus);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace irrkit
