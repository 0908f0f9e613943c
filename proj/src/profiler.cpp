#include "irrkit/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "irrkit/io.hpp"
#include "irrkit/stats.hpp"

namespace irrkit {

// --- FeatureTable -------------------------------------------------------------

std::optional<std::size_t> FeatureTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < feature_names.size(); ++c) {
    if (feature_names[c] == name) return c;
  }
  return std::nullopt;
}

std::vector<double> FeatureTable::column_values(std::string_view name) const {
  auto c = column(name);
  if (!c) throw Error(ErrorCode::NotFound, "no feature column " + std::string(name));
  std::vector<double> out(values.rows());
  for (std::size_t r = 0; r < values.rows(); ++r) out[r] = values(r, *c);
  return out;
}

FeatureTable FeatureTable::without(std::string_view name) const {
  auto drop = column(name);
  if (!drop) throw Error(ErrorCode::NotFound, "no feature column " + std::string(name));
  std::vector<std::size_t> keep;
  FeatureTable out;
  for (std::size_t c = 0; c < feature_names.size(); ++c) {
    if (c == *drop) continue;
    keep.push_back(c);
    out.feature_names.push_back(feature_names[c]);
  }
  out.users = users;
  out.values = values.select_cols(keep);
  return out;
}

FeatureTable FeatureTable::with_column(std::string name, const std::vector<double>& column) const {
  if (column.size() != users.size()) {
    throw Error(ErrorCode::InvalidArgument, "column length does not match user count");
  }
  FeatureTable out;
  out.feature_names = feature_names;
  out.feature_names.push_back(std::move(name));
  out.users = users;
  std::vector<double> row;
  for (std::size_t r = 0; r < users.size(); ++r) {
    auto src = values.row(r);
    row.assign(src.begin(), src.end());
    row.push_back(column[r]);
    out.values.append_row(row);
  }
  return out;
}

void FeatureTable::write_csv(std::ostream& out) const {
  out << "user_id";
  for (const auto& name : feature_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < users.size(); ++r) {
    out << io::csv_field(users[r]);
    for (std::size_t c = 0; c < feature_names.size(); ++c) out << ',' << io::format_real(values(r, c));
    out << '\n';
  }
}

// --- topics -------------------------------------------------------------------

void TopicDistributions::set(const PostId& post, std::vector<double> distribution) {
  if (distribution.size() != topics_) {
    throw Error(ErrorCode::Validation, "topic vector for " + post + " has " +
                                           std::to_string(distribution.size()) + " entries, expected " +
                                           std::to_string(topics_));
  }
  double total = 0.0;
  for (double p : distribution) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::Validation, "topic vector for " + post + " has a negative or non-finite entry");
    }
    total += p;
  }
  if (total <= 0.0) throw Error(ErrorCode::Validation, "topic vector for " + post + " sums to zero");
  for (double& p : distribution) p /= total;
  distributions_[post] = std::move(distribution);
}

const std::vector<double>* TopicDistributions::find(std::string_view post) const {
  auto it = distributions_.find(post);
  return it == distributions_.end() ? nullptr : &it->second;
}

TopicDistributions TopicDistributions::load(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  TopicDistributions out;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv(line);
    if (first) {
      first = false;
      if (!fields.empty() && io::trim(fields[0]) == "post_id") {
        out.topics_ = fields.size() - 1;
        continue;
      }
      out.topics_ = fields.size() - 1;
    }
    if (out.topics_ == 0) throw Error(ErrorCode::Parse, path + ": no topic columns");
    std::vector<double> dist;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto p = io::parse_real(io::trim(fields[i]));
      if (!p) throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": bad probability");
      dist.push_back(*p);
    }
    out.set(io::trim(fields[0]), std::move(dist));
  }
  return out;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

TopicDistributions TopicDistributions::hashed(const Corpus& corpus, const LexiconSet& lexicons,
                                              std::size_t topics) {
  if (topics == 0) throw Error(ErrorCode::InvalidArgument, "topic count must be positive");
  TopicDistributions out(topics);
  for (const auto& thread : corpus.threads()) {
    for (const auto& post : thread.posts()) {
      std::vector<double> dist(topics, 0.0);
      const auto tok = tokenize(post.body, lexicons);
      for (const auto& t : tok.tokens) dist[fnv1a(t.text) % topics] += 1.0;
      if (tok.tokens.empty()) std::fill(dist.begin(), dist.end(), 1.0);
      out.set(post.post_id, std::move(dist));
    }
  }
  return out;
}

double topic_entropy(std::span<const double> distribution) {
  double h = 0.0;
  for (double p : distribution) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double topic_log_energy(std::span<const double> distribution, double epsilon) {
  double e = 0.0;
  for (double p : distribution) e += std::log(p * p + epsilon);
  return e;
}

// --- user features ------------------------------------------------------------

const std::vector<std::string>& user_feature_names() {
  static const std::vector<std::string> names = {
      "initial_posts",        "replies_to_others",
      "threads_touched",      "posts_after_mine",
      "avg_response_delay_minutes", "total_post_bytes",
      "avg_post_bytes",       "avg_top30_post_bytes",
      "active_days",          "activity_span_days",
      "posts_per_active_day", "posts_per_span_day",
      "in_degree",            "out_degree",
      "betweenness",          "pagerank",
      "pct_positive_words",   "pct_negative_words",
      "pct_slang",            "pct_strong_emotion_words",
      "pos_neg_word_ratio",   "topic_entropy",
      "topic_log_energy",     "irr_count",
  };
  return names;
}

namespace {

struct UserAccumulator {
  double initial_posts = 0;
  double replies_to_others = 0;
  double threads_touched = 0;
  double posts_after_mine = 0;
  double delay_sum_minutes = 0;
  double delay_count = 0;
  std::vector<double> post_bytes;
  std::set<std::int64_t> days;
  double frac_pos = 0, frac_neg = 0, frac_slang = 0, frac_strong = 0;
  double word_pos = 0, word_neg = 0;
  std::vector<double> topic_sum;
};

std::int64_t utc_day(std::int64_t ts) {
  return ts >= 0 ? ts / 86400 : -((-ts + 86399) / 86400);
}

}  // namespace

FeatureTable user_features(const UserFeatureInputs& inputs) {
  if (!inputs.corpus || !inputs.lexicons) {
    throw Error(ErrorCode::InvalidArgument, "user_features needs a corpus and lexicons");
  }
  const Corpus& corpus = *inputs.corpus;
  const LexiconSet& lex = *inputs.lexicons;

  std::optional<DirectedGraph> own_graph;
  const DirectedGraph* graph = inputs.graph;
  if (!graph) {
    own_graph = build_post_reply_graph(corpus);
    graph = &*own_graph;
  }
  std::optional<TopicDistributions> own_topics;
  const TopicDistributions* topics = inputs.topics;
  if (!topics) {
    own_topics = TopicDistributions::hashed(corpus, lex);
    topics = &*own_topics;
  }
  const std::size_t topic_count = topics->topic_count();

  std::map<UserId, UserAccumulator> acc;
  for (const auto& u : corpus.users()) acc[u].topic_sum.assign(topic_count, 0.0);

  double max_delay = 0.0;
  for (const auto& thread : corpus.threads()) {
    const auto& posts = thread.posts();
    acc[thread.originator()].initial_posts += 1;
    for (std::size_t i : thread.responding_replies()) acc[posts[i].user_id].replies_to_others += 1;

    std::map<UserId, std::size_t> first_position;
    for (std::size_t i = 0; i < posts.size(); ++i) first_position.emplace(posts[i].user_id, i);
    for (const auto& [user, first] : first_position) {
      auto& a = acc[user];
      a.threads_touched += 1;
      for (std::size_t j = first + 1; j < posts.size(); ++j) {
        if (posts[j].user_id != user) a.posts_after_mine += 1;
      }
    }

    // Delay from each post to the next post by somebody else.
    for (std::size_t i = 0; i < posts.size(); ++i) {
      for (std::size_t j = i + 1; j < posts.size(); ++j) {
        if (posts[j].user_id == posts[i].user_id) continue;
        const double minutes = static_cast<double>(posts[j].timestamp - posts[i].timestamp) / 60.0;
        auto& a = acc[posts[i].user_id];
        a.delay_sum_minutes += minutes;
        a.delay_count += 1;
        max_delay = std::max(max_delay, minutes);
        break;
      }
    }

    for (const auto& post : posts) {
      auto& a = acc[post.user_id];
      a.post_bytes.push_back(static_cast<double>(post.body.size()));
      a.days.insert(utc_day(post.timestamp));

      const auto tok = tokenize(post.body, lex);
      double pos = 0, neg = 0, slang = 0;
      for (const auto& t : tok.tokens) {
        if (lex.is_positive(t.text)) pos += 1;
        if (lex.is_negative(t.text)) neg += 1;
        if (lex.is_slang(t.text) || lex.is_emoticon(t.text)) slang += 1;
      }
      const double strong = strong_emotion_tokens(tok.tokens, lex);
      const double len = static_cast<double>(tok.tokens.size());
      if (len > 0) {
        a.frac_pos += pos / len;
        a.frac_neg += neg / len;
        a.frac_slang += slang / len;
        a.frac_strong += strong / len;
      }
      a.word_pos += pos;
      a.word_neg += neg;

      const auto* dist = topics->find(post.post_id);
      if (!dist) throw Error(ErrorCode::NotFound, "no topic distribution for post " + post.post_id);
      for (std::size_t k = 0; k < topic_count; ++k) a.topic_sum[k] += (*dist)[k];
    }
  }

  const auto deg = degrees(*graph);
  const auto btw = betweenness(*graph);
  const auto pr = pagerank(*graph);

  FeatureTable table;
  table.feature_names = user_feature_names();
  table.users = corpus.users();
  std::vector<double> row;
  for (const auto& user : corpus.users()) {
    auto& a = acc[user];
    const double n_posts = static_cast<double>(a.post_bytes.size());
    const double total_bytes = std::accumulate(a.post_bytes.begin(), a.post_bytes.end(), 0.0);
    std::sort(a.post_bytes.begin(), a.post_bytes.end(), std::greater<>());
    const std::size_t top = std::min<std::size_t>(30, a.post_bytes.size());
    const double top_bytes = std::accumulate(a.post_bytes.begin(), a.post_bytes.begin() + top, 0.0);
    const double active_days = static_cast<double>(a.days.size());
    const double span = a.days.empty() ? 0.0 : static_cast<double>(*a.days.rbegin() - *a.days.begin());

    const auto v = graph->index_of(user);
    double in_deg = 0, out_deg = 0, between = 0, rank = 0;
    if (v) {
      in_deg = static_cast<double>(deg[*v].in);
      out_deg = static_cast<double>(deg[*v].out);
      between = btw[*v];
      rank = pr[*v];
    }

    std::vector<double> mean_topic(topic_count, 0.0);
    for (std::size_t k = 0; k < topic_count; ++k) mean_topic[k] = n_posts > 0 ? a.topic_sum[k] / n_posts : 0.0;

    double irr = 0.0;
    if (inputs.irr) {
      auto it = inputs.irr->counts.find(user);
      if (it != inputs.irr->counts.end()) irr = static_cast<double>(it->second);
    }

    row = {
        a.initial_posts,
        a.replies_to_others,
        a.threads_touched,
        a.posts_after_mine,
        a.delay_count > 0 ? a.delay_sum_minutes / a.delay_count : max_delay,
        total_bytes,
        n_posts > 0 ? total_bytes / n_posts : 0.0,
        top > 0 ? top_bytes / static_cast<double>(top) : 0.0,
        active_days,
        span,
        active_days > 0 ? n_posts / active_days : 0.0,
        n_posts / (span + 1.0),
        in_deg,
        out_deg,
        between,
        rank,
        n_posts > 0 ? a.frac_pos / n_posts : 0.0,
        n_posts > 0 ? a.frac_neg / n_posts : 0.0,
        n_posts > 0 ? a.frac_slang / n_posts : 0.0,
        n_posts > 0 ? a.frac_strong / n_posts : 0.0,
        (a.word_pos + 1.0) / (a.word_neg + 1.0),
        topic_entropy(mean_topic),
        topic_log_energy(mean_topic),
        irr,
    };
    table.values.append_row(row);
  }
  return table;
}

FeatureTable augment_with_clusters(const FeatureTable& table,
                                   const std::map<UserId, std::string>& clusters) {
  const std::size_t d = table.feature_names.size();
  std::map<std::string, std::vector<std::size_t>> members;
  std::vector<std::string> cluster_of(table.users.size());
  for (std::size_t r = 0; r < table.users.size(); ++r) {
    auto it = clusters.find(table.users[r]);
    // The leading NUL keeps singleton keys apart from real cluster names.
    cluster_of[r] = it != clusters.end() ? it->second : std::string(1, '\0') + table.users[r];
    members[cluster_of[r]].push_back(r);
  }
  std::map<std::string, std::vector<double>> means;
  for (const auto& [name, rows] : members) {
    std::vector<double> m(d, 0.0);
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < d; ++c) m[c] += table.values(r, c);
    }
    for (double& x : m) x /= static_cast<double>(rows.size());
    means.emplace(name, std::move(m));
  }
  FeatureTable out;
  out.feature_names = table.feature_names;
  for (const auto& name : table.feature_names) out.feature_names.push_back("cluster_mean_" + name);
  out.users = table.users;
  std::vector<double> row;
  for (std::size_t r = 0; r < table.users.size(); ++r) {
    auto src = table.values.row(r);
    row.assign(src.begin(), src.end());
    const auto& m = means.at(cluster_of[r]);
    row.insert(row.end(), m.begin(), m.end());
    out.values.append_row(row);
  }
  return out;
}

std::map<UserId, std::string> load_clusters(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::map<UserId, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv(line);
    if (fields.size() != 2) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": expected user_id,cluster");
    }
    const auto user = io::trim(fields[0]);
    if (line_no == 1 && user == "user_id") continue;
    out[user] = io::trim(fields[1]);
  }
  return out;
}

// --- labels and rankings ------------------------------------------------------

IuLabelSet IuLabelSet::load(const std::string& path) {
  IuLabelSet out;
  for (auto& line : io::read_list(path)) out.influential.insert(std::move(line));
  out.provenance = std::filesystem::path(path).filename().string();
  return out;
}

IuLabelSet IuLabelSet::unite(const IuLabelSet& a, const IuLabelSet& b) {
  IuLabelSet out = a;
  out.influential.insert(b.influential.begin(), b.influential.end());
  out.provenance = a.provenance + "+" + b.provenance;
  return out;
}

Ranking Ranking::from_scores(std::string source, const std::map<UserId, double>& scores) {
  Ranking out;
  out.source = std::move(source);
  for (const auto& [user, score] : scores) {
    if (std::isnan(score)) throw Error(ErrorCode::Numeric, "NaN score for user " + user);
    out.entries.push_back({user, score});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.user < b.user;
  });
  return out;
}

Ranking Ranking::load(const std::string& path) {
  std::istringstream in(io::read_file(path));
  Ranking out;
  out.source = std::filesystem::path(path).stem().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": expected rank,user_id,score");
    }
    if (io::trim(fields[0]) == "rank") continue;
    const auto score = io::parse_real(io::trim(fields[2]));
    if (!score) throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": bad score");
    out.entries.push_back({io::trim(fields[1]), *score});
  }
  return out;
}

void Ranking::write_csv(std::ostream& out) const {
  out << "rank,user_id,score\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out << i + 1 << ',' << io::csv_field(entries[i].user) << ',' << io::format_real(entries[i].score)
        << '\n';
  }
}

const std::vector<std::string>& ranking_metrics() {
  static const std::vector<std::string> names = {
      "threads_initiated", "total_posts", "in_degree",         "out_degree",
      "betweenness",       "pagerank",    "early_replies_24h", "irr_count",
  };
  return names;
}

std::map<UserId, double> metric_scores(std::string_view metric, const MetricInputs& inputs) {
  if (!inputs.corpus) throw Error(ErrorCode::InvalidArgument, "metric needs a corpus");
  const Corpus& corpus = *inputs.corpus;
  std::map<UserId, double> out;
  for (const auto& u : corpus.users()) out.emplace_hint(out.end(), u, 0.0);

  if (metric == "threads_initiated") {
    for (const auto& t : corpus.threads()) out[t.originator()] += 1;
  } else if (metric == "total_posts") {
    for (const auto& t : corpus.threads()) {
      for (const auto& p : t.posts()) out[p.user_id] += 1;
    }
  } else if (metric == "in_degree" || metric == "out_degree" || metric == "betweenness" ||
             metric == "pagerank") {
    const auto g = build_post_reply_graph(corpus);
    std::vector<double> values(g.size());
    if (metric == "betweenness") {
      values = betweenness(g);
    } else if (metric == "pagerank") {
      values = pagerank(g);
    } else {
      const auto deg = degrees(g);
      for (std::size_t v = 0; v < g.size(); ++v) {
        values[v] = static_cast<double>(metric == "in_degree" ? deg[v].in : deg[v].out);
      }
    }
    for (std::size_t v = 0; v < g.size(); ++v) out[g.nodes()[v]] = values[v];
  } else if (metric == "early_replies_24h") {
    for (const auto& [u, n] : early_reply_counts(corpus, 24.0, inputs.restrict_eligible)) {
      out[u] = static_cast<double>(n);
    }
  } else if (metric == "irr_count") {
    if (!inputs.scores) throw Error(ErrorCode::InvalidArgument, "irr_count needs post scores");
    for (const auto& [u, n] : irr_counts(corpus, *inputs.scores, inputs.threshold).counts) {
      out[u] = static_cast<double>(n);
    }
  } else {
    throw Error(ErrorCode::Config, "unknown ranking metric: " + std::string(metric));
  }
  return out;
}

Ranking rank_users(std::string_view metric, const MetricInputs& inputs) {
  return Ranking::from_scores(std::string(metric), metric_scores(metric, inputs));
}

namespace {

std::size_t hits_at(const Ranking& ranking, const IuLabelSet& labels, std::size_t k) {
  const std::size_t n = std::min(k, ranking.entries.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += labels.contains(ranking.entries[i].user) ? 1 : 0;
  return hits;
}

}  // namespace

TopKResult topk_recall(const Ranking& ranking, const IuLabelSet& labels, std::size_t k) {
  if (labels.size() == 0) throw Error(ErrorCode::InvalidArgument, "recall needs a non-empty label set");
  TopKResult r;
  r.k = k;
  r.hits = hits_at(ranking, labels, k);
  const double total = static_cast<double>(labels.size());
  r.value = static_cast<double>(r.hits) / total;
  r.max_possible = static_cast<double>(std::min(k, labels.size())) / total;
  return r;
}

TopKResult topk_precision(const Ranking& ranking, const IuLabelSet& labels, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "precision needs K >= 1");
  TopKResult r;
  r.k = k;
  r.hits = hits_at(ranking, labels, k);
  r.value = static_cast<double>(r.hits) / static_cast<double>(k);
  r.max_possible = static_cast<double>(std::min(k, labels.size())) / static_cast<double>(k);
  return r;
}

nlohmann::json evaluation_report(const std::vector<Ranking>& rankings, const IuLabelSet& labels,
                                 const std::vector<std::size_t>& ks) {
  nlohmann::json report;
  report["labels"] = {{"provenance", labels.provenance}, {"size", labels.size()}};
  report["sources"] = nlohmann::json::array();
  for (const auto& ranking : rankings) {
    nlohmann::json results = nlohmann::json::array();
    for (std::size_t k : ks) {
      const auto rec = topk_recall(ranking, labels, k);
      const auto prec = topk_precision(ranking, labels, k);
      results.push_back({{"k", k},
                         {"hits", rec.hits},
                         {"recall", io::json_real(rec.value)},
                         {"max_possible_recall", io::json_real(rec.max_possible)},
                         {"precision", io::json_real(prec.value)},
                         {"max_possible_precision", io::json_real(prec.max_possible)}});
    }
    report["sources"].push_back({{"source", ranking.source}, {"results", results}});
  }
  return report;
}

// --- influential-user classifiers ---------------------------------------------

const char* iu_model_kind_name(IuModelKind kind) noexcept {
  switch (kind) {
    case IuModelKind::NaiveBayes: return "naive-bayes";
    case IuModelKind::Logistic: return "logistic";
    case IuModelKind::RandomForest: return "random-forest";
  }
  return "unknown";
}

IuModelKind parse_iu_model_kind(std::string_view name) {
  for (auto k : {IuModelKind::NaiveBayes, IuModelKind::Logistic, IuModelKind::RandomForest}) {
    if (name == iu_model_kind_name(k)) return k;
  }
  throw Error(ErrorCode::Config, "unknown user model: " + std::string(name));
}

std::map<UserId, double> UserProbabilities::as_map() const {
  std::map<UserId, double> out;
  for (std::size_t i = 0; i < users.size(); ++i) out[users[i]] = values[i];
  return out;
}

std::vector<int> label_vector(const std::vector<UserId>& users, const IuLabelSet& labels) {
  std::vector<int> y(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) y[i] = labels.contains(users[i]) ? 1 : 0;
  return y;
}

double predict_iu(const IuModel& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model);
}

namespace {

IuModel fit(IuModelKind kind, const ml::Matrix& x, std::span<const int> y, const IuTrainOptions& options,
            std::uint64_t seed, bool stacker) {
  switch (kind) {
    case IuModelKind::NaiveBayes: return ml::train_naive_bayes(x, y);
    case IuModelKind::Logistic: {
      ml::LogisticOptions lo;
      lo.l2 = options.logistic_l2;
      return ml::train_logistic(x, y, lo);
    }
    case IuModelKind::RandomForest: {
      ml::ForestOptions fo;
      fo.trees = options.forest_trees;
      fo.seed = seed;
      if (stacker) {
        fo.max_features = x.cols();
        fo.min_samples_leaf = options.ensemble_min_leaf;
      }
      return ml::train_random_forest(x, y, fo);
    }
  }
  throw Error(ErrorCode::Internal, "unhandled model kind");
}

IuTrainResult cross_fit(IuModelKind kind, const ml::Matrix& x, const std::vector<UserId>& users,
                        const IuLabelSet& labels, const IuTrainOptions& options, std::string source,
                        bool stacker = false) {
  const auto y = label_vector(users, labels);
  ml::check_training_set(x, y, 2);
  const auto positives = static_cast<int>(std::count(y.begin(), y.end(), 1));
  const auto negatives = static_cast<int>(y.size()) - positives;
  const int k = std::min({options.folds, positives, negatives});
  if (k < 2) throw Error(ErrorCode::Validation, "too few labelled users for cross-validation");
  const auto fold = ml::stratified_folds(y, k, options.seed);

  UserProbabilities oof{std::move(source), users, std::vector<double>(users.size(), 0.0)};
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? test : train).push_back(i);
    std::vector<int> y_train;
    for (std::size_t i : train) y_train.push_back(y[i]);
    const auto model = fit(kind, x.select_rows(train), y_train, options,
                           options.seed + static_cast<std::uint64_t>(f) + 1, stacker);
    for (std::size_t i : test) oof.values[i] = predict_iu(model, x.row(i));
  }
  return {fit(kind, x, y, options, options.seed, stacker), std::move(oof)};
}

}  // namespace

IuTrainResult train_iu_base(const FeatureTable& features, const IuLabelSet& labels, IuModelKind kind,
                            const IuTrainOptions& options) {
  return cross_fit(kind, features.values, features.users, labels, options, iu_model_kind_name(kind));
}

IuTrainResult train_iu_ensemble(const std::vector<UserProbabilities>& base_outputs,
                                const IuLabelSet& labels, const IuTrainOptions& options,
                                const std::vector<double>* irr_column) {
  if (base_outputs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "ensemble needs at least two base outputs");
  }
  const auto& users = base_outputs.front().users;
  for (const auto& b : base_outputs) {
    if (b.users != users || b.values.size() != users.size()) {
      throw Error(ErrorCode::Validation, "base output " + b.source + " covers different users");
    }
  }
  if (irr_column && irr_column->size() != users.size()) {
    throw Error(ErrorCode::Validation, "irr_count column covers different users");
  }
  ml::Matrix x;
  std::vector<double> row;
  for (std::size_t i = 0; i < users.size(); ++i) {
    row.clear();
    for (const auto& b : base_outputs) row.push_back(b.values[i]);
    if (irr_column) row.push_back((*irr_column)[i]);
    x.append_row(row);
  }
  return cross_fit(IuModelKind::RandomForest, x, users, labels, options,
                   irr_column ? "ensemble+irr" : "ensemble", true);
}

}  // namespace irrkit
