// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irrkit/irrkit.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

struct Failure {
  irr_status status;
  std::string message;
};

void check(irr_status status) {
  if (status != IRR_OK) throw Failure{status, irr_last_error()};
}

void usage_error(const std::string& message) { throw Failure{IRR_ERR_CONFIG, message}; }

// Small RAII wrappers over the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Corpus = Handle<irr_corpus, irr_corpus_free>;
using Lexicon = Handle<irr_lexicon, irr_lexicon_free>;
using Model = Handle<irr_model, irr_model_free>;
using Scores = Handle<irr_scores, irr_scores_free>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { irr_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{IRR_ERR_IO, "cannot write " + path.string()};
  out << text;
  if (!out) throw Failure{IRR_ERR_IO, "write failed: " + path.string()};
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) usage_error(std::string("--") + what + " is required");
  if (!fs::exists(path)) throw Failure{IRR_ERR_IO, std::string(what) + " not found: " + path};
}

void load_lexicon(const std::string& dir, Lexicon& lex) {
  if (dir.empty()) {
    check(irr_lexicon_builtin(lex.out()));
  } else {
    check(irr_lexicon_load(dir.c_str(), lex.out()));
  }
}

struct Settings {
  int schema_version = kSchemaVersion;
  std::string corpus, scores, model, labels, out, lexicon, topics, clusters, synth_config;
  std::vector<std::string> rankings, metrics;
  std::string iu_model;
  double threshold = 0.5;
  std::vector<double> thresholds = {0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<std::size_t> ks = {50, 100, 150};
  int bins = 20;
  std::uint64_t seed = 42;
  int folds = 10;
  int rounds = 50;
  int trees = 100;
  std::string model_kind = "adaboost-stumps";
  std::vector<std::string> features;
  bool select_features = false;
  bool restrict_eligible = false;
  std::optional<std::size_t> users, threads, influencers;
  std::optional<double> uplift;
};

fs::path prepare_out(const Settings& s) {
  if (s.out.empty()) usage_error("--out is required");
  fs::create_directories(s.out);
  return s.out;
}

void echo_config(const CLI::App& app, const fs::path& out) {
  std::string text = "# irrkit ";
  text += irr_version();
  text += "\n";
  text += app.config_to_str(true, false);
  write_text(out / "run_config.toml", text);
}

void run_ingest(const Settings& s, const fs::path& out) {
  require_file(s.corpus, "corpus");
  Corpus corpus;
  OwnedString report;
  const irr_status status = irr_corpus_ingest(s.corpus.c_str(), corpus.out(), &report.ptr);
  const std::string error = irr_last_error();
  write_text(out / "validation_report.txt", report.str());
  if (status != IRR_OK) throw Failure{status, error};
  check(irr_corpus_save(corpus.get(), (out / "corpus.tsv").string().c_str()));
  std::cout << "threads " << irr_corpus_thread_count(corpus.get()) << ", posts "
            << irr_corpus_post_count(corpus.get()) << ", users " << irr_corpus_user_count(corpus.get())
            << '\n';
}

void run_train(const Settings& s, const fs::path& out) {
  require_file(s.corpus, "corpus");
  require_file(s.labels, "labels");
  Corpus corpus;
  check(irr_corpus_load(s.corpus.c_str(), corpus.out()));
  Lexicon lex;
  load_lexicon(s.lexicon, lex);
  json options = {{"model", s.model_kind}, {"rounds", s.rounds},          {"seed", s.seed},
                  {"folds", s.folds},      {"select_features", s.select_features}};
  if (!s.features.empty()) options["features"] = s.features;
  Model model;
  OwnedString report;
  check(irr_sentiment_train(corpus.get(), lex.get(), s.labels.c_str(), options.dump().c_str(), model.out(),
                            &report.ptr));
  check(irr_model_save(model.get(), (out / "model.json").string().c_str()));
  write_text(out / "cv_report.json", report.str());
  std::cout << report.str();
}

void run_score(const Settings& s, const fs::path& out) {
  require_file(s.corpus, "corpus");
  require_file(s.model, "model");
  Corpus corpus;
  check(irr_corpus_load(s.corpus.c_str(), corpus.out()));
  Lexicon lex;
  load_lexicon(s.lexicon, lex);
  Model model;
  check(irr_model_load(s.model.c_str(), model.out()));
  Scores scores;
  check(irr_score_posts(corpus.get(), model.get(), lex.get(), s.threshold, scores.out()));
  check(irr_scores_save(scores.get(), corpus.get(), (out / "scores.csv").string().c_str()));
}

void load_corpus_and_scores(const Settings& s, Corpus& corpus, Scores& scores, bool scores_required) {
  require_file(s.corpus, "corpus");
  check(irr_corpus_load(s.corpus.c_str(), corpus.out()));
  if (s.scores.empty()) {
    if (scores_required) usage_error("--scores is required");
    return;
  }
  require_file(s.scores, "scores");
  check(irr_scores_load(s.scores.c_str(), s.threshold, scores.out()));
}

void run_dynamics(const Settings& s, const fs::path& out) {
  Corpus corpus;
  Scores scores;
  load_corpus_and_scores(s, corpus, scores, true);
  const json options = {{"threshold", s.threshold}, {"bins", s.bins}};
  check(irr_dynamics_write(corpus.get(), scores.get(), options.dump().c_str(), out.string().c_str()));
}

void run_rank(const Settings& s, const fs::path& out) {
  Corpus corpus;
  Scores scores;
  const bool needs_scores = !s.iu_model.empty() ||
                            std::find(s.metrics.begin(), s.metrics.end(), "irr_count") != s.metrics.end();
  load_corpus_and_scores(s, corpus, scores, needs_scores);

  if (!s.iu_model.empty()) {
    require_file(s.labels, "labels");
    Lexicon lex;
    load_lexicon(s.lexicon, lex);
    json options = {{"model", s.iu_model}, {"threshold", s.threshold}, {"folds", s.folds},
                    {"seed", s.seed},      {"trees", s.trees},
                    {"features_out", (out / "user_features.csv").string()}};
    if (!s.topics.empty()) options["topics"] = s.topics;
    if (!s.clusters.empty()) options["clusters"] = s.clusters;
    const auto path = out / ("ranking_" + s.iu_model + ".csv");
    check(irr_rank_model(corpus.get(), scores.get(), lex.get(), s.labels.c_str(), options.dump().c_str(),
                         path.string().c_str()));
    return;
  }
  const json options = {{"threshold", s.threshold}, {"restrict_eligible", s.restrict_eligible}};
  std::vector<std::string> metrics = s.metrics;
  if (metrics.empty()) {
    metrics = {"threads_initiated", "total_posts", "in_degree", "out_degree",
               "betweenness", "pagerank", "early_replies_24h"};
    if (scores.get()) metrics.push_back("irr_count");
  }
  for (const auto& metric : metrics) {
    const auto path = out / ("ranking_" + metric + ".csv");
    check(irr_rank_metric(corpus.get(), scores.get(), metric.c_str(), options.dump().c_str(),
                          path.string().c_str()));
  }
}

void run_evaluate(const Settings& s, const fs::path& out) {
  if (s.rankings.empty()) usage_error("--ranking is required");
  require_file(s.labels, "labels");
  std::vector<const char*> paths;
  for (const auto& r : s.rankings) {
    require_file(r, "ranking");
    paths.push_back(r.c_str());
  }
  OwnedString report;
  check(irr_evaluate(paths.data(), paths.size(), s.labels.c_str(), s.ks.data(), s.ks.size(), &report.ptr));
  write_text(out / "evaluation.json", report.str());
  std::cout << report.str();
}

void run_sensitivity(const Settings& s, const fs::path& out) {
  Corpus corpus;
  Scores scores;
  load_corpus_and_scores(s, corpus, scores, true);
  if (!s.labels.empty()) require_file(s.labels, "labels");
  check(irr_sensitivity(corpus.get(), scores.get(), s.thresholds.data(), s.thresholds.size(),
                        s.labels.empty() ? nullptr : s.labels.c_str(), s.ks.data(), s.ks.size(),
                        out.string().c_str()));
}

void run_features(const Settings& s, const fs::path& out) {
  Corpus corpus;
  Scores scores;
  load_corpus_and_scores(s, corpus, scores, true);
  Lexicon lex;
  load_lexicon(s.lexicon, lex);
  json options = {{"threshold", s.threshold}};
  if (!s.topics.empty()) options["topics"] = s.topics;
  if (!s.clusters.empty()) options["clusters"] = s.clusters;
  check(irr_features_write(corpus.get(), scores.get(), lex.get(), options.dump().c_str(),
                           (out / "user_features.csv").string().c_str()));
}

void run_generate(const Settings& s, const fs::path& out) {
  json config = json::object();
  if (!s.synth_config.empty()) {
    require_file(s.synth_config, "synth-config");
    std::ifstream in(s.synth_config);
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      throw Failure{IRR_ERR_PARSE, s.synth_config + ": " + e.what()};
    }
  }
  config["seed"] = s.seed;
  if (s.users) config["user_count"] = *s.users;
  if (s.threads) config["thread_count"] = *s.threads;
  if (s.influencers) config["influencer_count"] = *s.influencers;
  if (s.uplift) config["influence_uplift"] = *s.uplift;
  check(irr_generate(config.dump().c_str(), out.string().c_str()));
  write_text(out / "synth_config.json", config.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influential responding reply toolkit"};
  app.set_version_flag("--version", std::string(irr_version()));
  app.set_config("--config", "", "TOML/INI file with option values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  Settings s;
  app.add_option("--schema-version", s.schema_version, "Config schema version")
      ->check(CLI::Range(kSchemaVersion, kSchemaVersion));

  auto sub = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->allow_config_extras(CLI::config_extras_mode::error);
    c->add_option("--out", s.out, "Output directory")->required();
    return c;
  };

  auto* ingest = sub("ingest", "Validate and normalise a corpus file");
  ingest->add_option("--corpus", s.corpus, "Corpus file")->required();

  auto* train = sub("train-sentiment", "Train a sentiment classifier and cross-validate it");
  train->add_option("--corpus", s.corpus)->required();
  train->add_option("--labels", s.labels, "CSV post_id,label (pos/neg)")->required();
  train->add_option("--model-kind", s.model_kind)
      ->check(CLI::IsMember({"adaboost-stumps", "logistic", "decision-tree"}));
  train->add_option("--rounds", s.rounds)->check(CLI::PositiveNumber);
  train->add_option("--folds", s.folds)->check(CLI::Range(2, 1000));
  train->add_option("--seed", s.seed);
  train->add_option("--features", s.features, "Feature subset by name")->delimiter(',');
  train->add_flag("--select-features", s.select_features, "Greedy forward feature selection");
  train->add_option("--lexicon", s.lexicon, "Lexicon directory (default: built-in)");

  auto* score = sub("score", "Score every post with a trained model");
  score->add_option("--corpus", s.corpus)->required();
  score->add_option("--model", s.model, "model.json")->required();
  score->add_option("--threshold", s.threshold)->check(CLI::Range(0.0, 1.0));
  score->add_option("--lexicon", s.lexicon);

  auto* dynamics = sub("dynamics", "Sentiment dynamics series and statistics");
  dynamics->add_option("--corpus", s.corpus)->required();
  dynamics->add_option("--scores", s.scores)->required();
  dynamics->add_option("--threshold", s.threshold)->check(CLI::Range(0.0, 1.0));
  dynamics->add_option("--bins", s.bins)->check(CLI::Range(1, 10000));

  auto* rank = sub("rank", "Rank users by a metric or a user classifier");
  rank->add_option("--corpus", s.corpus)->required();
  rank->add_option("--scores", s.scores);
  auto* metric_opt = rank->add_option("--metric", s.metrics, "Ranking metric (repeatable; default: all)");
  rank->add_option("--iu-model", s.iu_model, "User classifier instead of a metric")
      ->check(CLI::IsMember({"naive-bayes", "logistic", "random-forest", "ensemble", "ensemble+irr"}))
      ->excludes(metric_opt);
  rank->add_option("--labels", s.labels, "Influential users, one id per line (classifiers)");
  rank->add_option("--threshold", s.threshold)->check(CLI::Range(0.0, 1.0));
  rank->add_option("--folds", s.folds)->check(CLI::Range(2, 1000));
  rank->add_option("--seed", s.seed);
  rank->add_option("--trees", s.trees)->check(CLI::PositiveNumber);
  rank->add_option("--topics", s.topics, "CSV post_id,p1..pT");
  rank->add_option("--clusters", s.clusters, "CSV user_id,cluster");
  rank->add_option("--lexicon", s.lexicon);
  rank->add_flag("--restrict-eligible", s.restrict_eligible, "early_replies_24h over eligible threads only");

  auto* evaluate = sub("evaluate", "Top-K recall and precision of rankings");
  evaluate->add_option("--ranking", s.rankings, "Ranking CSV (repeatable)")->required();
  evaluate->add_option("--labels", s.labels)->required();
  evaluate->add_option("--k", s.ks)->delimiter(',');

  auto* sensitivity = sub("sensitivity", "IRR count stability across thresholds");
  sensitivity->add_option("--corpus", s.corpus)->required();
  sensitivity->add_option("--scores", s.scores)->required();
  sensitivity->add_option("--thresholds", s.thresholds)->delimiter(',');
  sensitivity->add_option("--labels", s.labels);
  sensitivity->add_option("--k", s.ks)->delimiter(',');

  auto* features = sub("features", "Per-user feature table");
  features->add_option("--corpus", s.corpus)->required();
  features->add_option("--scores", s.scores)->required();
  features->add_option("--threshold", s.threshold)->check(CLI::Range(0.0, 1.0));
  features->add_option("--topics", s.topics);
  features->add_option("--clusters", s.clusters);
  features->add_option("--lexicon", s.lexicon);

  auto* generate = sub("generate", "Synthetic corpus with planted ground truth");
  generate->add_option("--seed", s.seed);
  generate->add_option("--users", s.users);
  generate->add_option("--threads", s.threads);
  generate->add_option("--influencers", s.influencers);
  generate->add_option("--uplift", s.uplift);
  generate->add_option("--synth-config", s.synth_config, "JSON file with generator settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return IRR_ERR_CONFIG;
  }

  try {
    const fs::path out = prepare_out(s);
    CLI::App* active = app.get_subcommands().front();
    echo_config(app, out);
    const std::string name = active->get_name();
    if (name == "ingest") run_ingest(s, out);
    else if (name == "train-sentiment") run_train(s, out);
    else if (name == "score") run_score(s, out);
    else if (name == "dynamics") run_dynamics(s, out);
    else if (name == "rank") run_rank(s, out);
    else if (name == "evaluate") run_evaluate(s, out);
    else if (name == "sensitivity") run_sensitivity(s, out);
    else if (name == "features") run_features(s, out);
    else if (name == "generate") run_generate(s, out);
  } catch (const Failure& f) {
    std::cerr << "error: " << irr_status_name(f.status) << ": " << f.message << '\n';
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return IRR_ERR_INTERNAL;
  }
  return 0;
}
