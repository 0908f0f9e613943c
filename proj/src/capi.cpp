#include "irrkit/irrkit.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "irrkit/corpus.hpp"
#include "irrkit/dynamics.hpp"
#include "irrkit/graph.hpp"
#include "irrkit/influence.hpp"
#include "irrkit/io.hpp"
#include "irrkit/profiler.hpp"
#include "irrkit/scores.hpp"
#include "irrkit/sentiment.hpp"
#include "irrkit/synth.hpp"
#include "irrkit/version.hpp"

struct irr_corpus {
  irrkit::Corpus value;
};
struct irr_lexicon {
  irrkit::LexiconSet value;
};
struct irr_model {
  irrkit::SentimentModel value;
};
struct irr_scores {
  irrkit::PostScores value;
};

namespace {

using irrkit::Error;
using irrkit::ErrorCode;
using nlohmann::json;

thread_local std::string last_error;

irr_status to_status(ErrorCode code) { return static_cast<irr_status>(static_cast<int>(code)); }

irr_status fail(irr_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
irr_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return IRR_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(IRR_ERR_CONFIG, std::string("options: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(IRR_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IRR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IRR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IRR_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Parses an options document and rejects keys outside `allowed`.
json parse_options(const char* text, std::initializer_list<const char*> allowed) {
  json j = json::object();
  if (text && *text) {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Config, std::string("options are not valid JSON: ") + e.what());
    }
  }
  if (!j.is_object()) throw Error(ErrorCode::Config, "options must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw Error(ErrorCode::Config, "unknown option: " + key);
  }
  return j;
}

template <class T>
T option(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Config, std::string("bad value for option ") + key);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  irrkit::io::write_file(path.string(), text);
}

template <class T>
void write_table(const std::filesystem::path& path, const T& table) {
  std::ostringstream out;
  table.write_csv(out);
  write_text(path, out.str());
}

json correlation_json(const std::optional<irrkit::Correlation>& c) {
  if (!c) return nullptr;
  return {{"r", irrkit::io::json_real(c->r)}, {"p", irrkit::io::json_real(c->p)}};
}

json optional_real(const std::optional<double>& v) {
  return v ? irrkit::io::json_real(*v) : json(nullptr);
}

irrkit::FeatureTable build_features(const irrkit::Corpus& corpus, const irrkit::PostScores& scores,
                                    const irrkit::LexiconSet& lexicons, const json& options) {
  const double threshold = option<double>(options, "threshold", 0.5);
  const auto topics_path = option<std::string>(options, "topics", "");
  const auto clusters_path = option<std::string>(options, "clusters", "");
  const auto graph = irrkit::build_post_reply_graph(corpus);
  const auto irr = irrkit::irr_counts(corpus, scores, threshold);
  std::optional<irrkit::TopicDistributions> topics;
  if (!topics_path.empty()) topics = irrkit::TopicDistributions::load(topics_path);
  irrkit::UserFeatureInputs inputs{&corpus, &lexicons, &graph, &irr, topics ? &*topics : nullptr};
  auto table = irrkit::user_features(inputs);
  if (!clusters_path.empty()) {
    table = irrkit::augment_with_clusters(table, irrkit::load_clusters(clusters_path));
  }
  return table;
}

}  // namespace

extern "C" {

const char* irr_version(void) { return irrkit::kVersion; }

const char* irr_status_name(irr_status status) {
  if (status == IRR_OK) return "ok";
  if (status >= IRR_ERR_INVALID_ARGUMENT && status <= IRR_ERR_INTERNAL) {
    return irrkit::error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
  }
  return "unknown";
}

const char* irr_last_error(void) { return last_error.c_str(); }

void irr_string_free(char* s) { std::free(s); }

// ---- corpus ----

irr_status irr_corpus_ingest(const char* path, irr_corpus** out, char** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, std::string("cannot open ") + path);
    auto result = irrkit::ingest_corpus(in);
    if (report) *report = dup_string(result.report.to_text());
    if (!result.corpus) {
      throw Error(ErrorCode::Validation,
                  std::to_string(result.report.records_rejected) + " record(s) rejected in " + path);
    }
    *out = new irr_corpus{std::move(*result.corpus)};
  });
}

irr_status irr_corpus_load(const char* path, irr_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new irr_corpus{irrkit::load_corpus(path)};
  });
}

irr_status irr_corpus_save(const irr_corpus* corpus, const char* path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(path, "path");
    irrkit::save_corpus(path, corpus->value);
  });
}

size_t irr_corpus_thread_count(const irr_corpus* corpus) { return corpus ? corpus->value.thread_count() : 0; }
size_t irr_corpus_post_count(const irr_corpus* corpus) { return corpus ? corpus->value.post_count() : 0; }
size_t irr_corpus_user_count(const irr_corpus* corpus) { return corpus ? corpus->value.users().size() : 0; }
void irr_corpus_free(irr_corpus* corpus) { delete corpus; }

// ---- lexicons ----

irr_status irr_lexicon_builtin(irr_lexicon** out) {
  return guarded([&] {
    need(out, "out");
    *out = new irr_lexicon{irrkit::LexiconSet::builtin()};
  });
}

irr_status irr_lexicon_load(const char* dir, irr_lexicon** out) {
  return guarded([&] {
    need(dir, "dir");
    need(out, "out");
    *out = nullptr;
    auto lex = irrkit::load_lexicons(dir);
    lex.validate();
    *out = new irr_lexicon{std::move(lex)};
  });
}

void irr_lexicon_free(irr_lexicon* lexicon) { delete lexicon; }

// ---- sentiment ----

irr_status irr_sentiment_train(const irr_corpus* corpus, const irr_lexicon* lexicon,
                               const char* labels_path, const char* options_json, irr_model** out,
                               char** cv_report) {
  if (cv_report) *cv_report = nullptr;
  return guarded([&] {
    need(corpus, "corpus");
    need(lexicon, "lexicon");
    need(labels_path, "labels_path");
    need(out, "out");
    *out = nullptr;
    const auto options = parse_options(
        options_json, {"model", "rounds", "seed", "folds", "tree_depth", "l2", "features", "select_features"});

    irrkit::TrainConfig config;
    config.kind = irrkit::parse_model_kind(option<std::string>(options, "model", "adaboost-stumps"));
    config.rounds = option<int>(options, "rounds", config.rounds);
    config.seed = option<std::uint64_t>(options, "seed", config.seed);
    config.tree_depth = option<int>(options, "tree_depth", config.tree_depth);
    config.l2 = option<double>(options, "l2", config.l2);
    const int folds = option<int>(options, "folds", 10);
    for (const auto& name : option<std::vector<std::string>>(options, "features", {})) {
      const auto& names = irrkit::feature_names();
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw Error(ErrorCode::Config, "unknown sentiment feature: " + name);
      config.feature_subset.push_back(static_cast<std::size_t>(it - names.begin()));
    }

    const auto labels = irrkit::load_sentiment_labels(labels_path);
    const auto examples = irrkit::labeled_examples(corpus->value, labels, lexicon->value);

    json report;
    if (option<bool>(options, "select_features", false)) {
      const auto selection = irrkit::select_features(examples, folds, config);
      config.feature_subset = selection.subset;
      report["selection_roc_area"] = irrkit::io::json_real(selection.roc_area);
    }
    const auto cv = irrkit::cross_validate(examples, folds, config);
    auto model = irrkit::train_classifier(examples, config);

    report["model"] = irrkit::model_kind_name(config.kind);
    report["labeled_posts"] = examples.size();
    report["folds"] = folds;
    report["accuracy"] = irrkit::io::json_real(cv.accuracy);
    report["roc_area"] = irrkit::io::json_real(cv.roc_area);
    json features = json::array();
    for (std::size_t f : model.feature_subset()) features.push_back(std::string(irrkit::feature_names()[f]));
    report["features"] = features;
    json per_fold = json::array();
    for (const auto& f : cv.per_fold) {
      per_fold.push_back({{"size", f.size},
                          {"accuracy", irrkit::io::json_real(f.accuracy)},
                          {"roc_area", irrkit::io::json_real(f.roc_area)}});
    }
    report["per_fold"] = per_fold;

    *out = new irr_model{std::move(model)};
    if (cv_report) *cv_report = dup_string(report.dump(2) + "\n");
  });
}

irr_status irr_model_load(const char* path, irr_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new irr_model{irrkit::load_model(path)};
  });
}

irr_status irr_model_save(const irr_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    irrkit::save_model(path, model->value);
  });
}

void irr_model_free(irr_model* model) { delete model; }

irr_status irr_score_posts(const irr_corpus* corpus, const irr_model* model, const irr_lexicon* lexicon,
                           double threshold, irr_scores** out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(model, "model");
    need(lexicon, "lexicon");
    need(out, "out");
    *out = nullptr;
    *out = new irr_scores{irrkit::score_posts(corpus->value, model->value, lexicon->value, threshold)};
  });
}

irr_status irr_scores_load(const char* path, double threshold, irr_scores** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new irr_scores{irrkit::load_scores(path, threshold)};
  });
}

irr_status irr_scores_save(const irr_scores* scores, const irr_corpus* corpus, const char* path) {
  return guarded([&] {
    need(scores, "scores");
    need(corpus, "corpus");
    need(path, "path");
    irrkit::save_scores(path, corpus->value, scores->value);
  });
}

irr_status irr_scores_posterior(const irr_scores* scores, const char* post_id, double* out) {
  return guarded([&] {
    need(scores, "scores");
    need(post_id, "post_id");
    need(out, "out");
    *out = scores->value.posterior(post_id);
  });
}

void irr_scores_free(irr_scores* scores) { delete scores; }

// ---- analyses ----

irr_status irr_dynamics_write(const irr_corpus* corpus, const irr_scores* scores, const char* options_json,
                              const char* out_dir) {
  return guarded([&] {
    need(corpus, "corpus");
    need(scores, "scores");
    need(out_dir, "out_dir");
    const auto options = parse_options(options_json, {"threshold", "bins"});
    const double threshold = option<double>(options, "threshold", 0.5);
    const int bins = option<int>(options, "bins", 20);
    const auto& c = corpus->value;
    const auto& s = scores->value;

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    write_table(dir / "position.csv", irrkit::sentiment_by_position(c, s));
    const auto reply_bins = irrkit::delta_vs_reply_sentiment(c, s, bins);
    write_table(dir / "delta_vs_reply.csv", reply_bins.series);
    const auto negative = irrkit::delta_histogram_negative_start(c, s, threshold, bins);
    write_table(dir / "negative_start_hist.csv", negative.histogram);
    const auto intervals = irrkit::interval_cdf(c);
    write_table(dir / "interval_first_cdf.csv", intervals.first);
    write_table(dir / "interval_last_cdf.csv", intervals.last);
    const auto rates = irrkit::transition_rates(c, s, threshold);

    std::size_t eligible = 0;
    for (auto n : reply_bins.bin_counts) eligible += n;

    json stats;
    stats["threshold"] = irrkit::io::json_real(threshold);
    stats["eligible_threads"] = eligible;
    stats["delta_vs_reply"] = {{"bins", bins},
                               {"bin_means", correlation_json(reply_bins.bin_correlation)},
                               {"threads", correlation_json(reply_bins.thread_correlation)}};
    stats["negative_start"] = {{"threads", negative.deltas.size()},
                               {"defined", negative.defined},
                               {"mean_delta", irrkit::io::json_real(negative.mean)},
                               {"fraction_negative_delta", irrkit::io::json_real(negative.frac_negative)},
                               {"t", irrkit::io::json_real(negative.t_test.t)},
                               {"p_one_sided", irrkit::io::json_real(negative.t_test.p)},
                               {"t_defined", negative.t_test.defined},
                               {"zero_variance", negative.t_test.zero_variance}};
    stats["transitions"] = {{"negative_starts", rates.negative_starts},
                            {"positive_starts", rates.positive_starts},
                            {"negative_start_turned_positive", optional_real(rates.neg_start_turned_pos)},
                            {"positive_start_stayed_positive", optional_real(rates.pos_start_stayed_pos)}};
    stats["interval"] = {{"median_first_self_reply_hours", optional_real(intervals.median_first_hours)},
                         {"fraction_first_below_24h", irrkit::io::json_real(intervals.fraction_first_below_24h)}};
    write_text(dir / "stats.json", stats.dump(2) + "\n");
  });
}

irr_status irr_rank_metric(const irr_corpus* corpus, const irr_scores* scores, const char* metric,
                           const char* options_json, const char* out_path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(metric, "metric");
    need(out_path, "out_path");
    const auto options = parse_options(options_json, {"threshold", "restrict_eligible"});
    irrkit::MetricInputs inputs;
    inputs.corpus = &corpus->value;
    inputs.scores = scores ? &scores->value : nullptr;
    inputs.threshold = option<double>(options, "threshold", 0.5);
    inputs.restrict_eligible = option<bool>(options, "restrict_eligible", false);
    std::ostringstream out;
    irrkit::rank_users(metric, inputs).write_csv(out);
    write_text(out_path, out.str());
  });
}

irr_status irr_rank_model(const irr_corpus* corpus, const irr_scores* scores, const irr_lexicon* lexicon,
                          const char* labels_path, const char* options_json, const char* out_path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(scores, "scores");
    need(lexicon, "lexicon");
    need(labels_path, "labels_path");
    need(out_path, "out_path");
    const auto options = parse_options(options_json, {"model", "threshold", "folds", "seed", "trees", "topics",
                                                      "clusters", "features_out"});
    const auto model = option<std::string>(options, "model", "ensemble+irr");
    irrkit::IuTrainOptions train;
    train.folds = option<int>(options, "folds", train.folds);
    train.seed = option<std::uint64_t>(options, "seed", train.seed);
    train.forest_trees = option<int>(options, "trees", train.forest_trees);

    const auto table = build_features(corpus->value, scores->value, lexicon->value, options);
    const auto features_out = option<std::string>(options, "features_out", "");
    if (!features_out.empty()) write_table(features_out, table);

    const auto labels = irrkit::IuLabelSet::load(labels_path);
    const auto base_table = table.without("irr_count");
    irrkit::UserProbabilities probabilities;
    if (model == "ensemble" || model == "ensemble+irr") {
      std::vector<irrkit::UserProbabilities> bases;
      for (auto kind : {irrkit::IuModelKind::NaiveBayes, irrkit::IuModelKind::Logistic,
                        irrkit::IuModelKind::RandomForest}) {
        bases.push_back(irrkit::train_iu_base(base_table, labels, kind, train).out_of_fold);
      }
      std::vector<double> irr_column;
      if (model == "ensemble+irr") irr_column = table.column_values("irr_count");
      probabilities =
          irrkit::train_iu_ensemble(bases, labels, train, model == "ensemble+irr" ? &irr_column : nullptr)
              .out_of_fold;
    } else {
      probabilities =
          irrkit::train_iu_base(base_table, labels, irrkit::parse_iu_model_kind(model), train).out_of_fold;
    }
    std::ostringstream out;
    irrkit::Ranking::from_scores(model, probabilities.as_map()).write_csv(out);
    write_text(out_path, out.str());
  });
}

irr_status irr_evaluate(const char* const* ranking_paths, size_t ranking_count, const char* labels_path,
                        const size_t* ks, size_t k_count, char** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    need(ranking_paths, "ranking_paths");
    need(labels_path, "labels_path");
    need(ks, "ks");
    need(report, "report");
    if (ranking_count == 0) throw Error(ErrorCode::InvalidArgument, "no rankings given");
    if (k_count == 0) throw Error(ErrorCode::InvalidArgument, "no K values given");
    std::vector<irrkit::Ranking> rankings;
    for (size_t i = 0; i < ranking_count; ++i) {
      need(ranking_paths[i], "ranking path");
      rankings.push_back(irrkit::Ranking::load(ranking_paths[i]));
    }
    const auto labels = irrkit::IuLabelSet::load(labels_path);
    const auto doc = irrkit::evaluation_report(rankings, labels, std::vector<std::size_t>(ks, ks + k_count));
    *report = dup_string(doc.dump(2) + "\n");
  });
}

irr_status irr_sensitivity(const irr_corpus* corpus, const irr_scores* scores, const double* thresholds,
                           size_t threshold_count, const char* labels_path, const size_t* ks, size_t k_count,
                           const char* out_dir) {
  return guarded([&] {
    need(corpus, "corpus");
    need(scores, "scores");
    need(out_dir, "out_dir");
    std::vector<double> ts = irrkit::default_thresholds();
    if (thresholds && threshold_count) ts.assign(thresholds, thresholds + threshold_count);
    const auto report = irrkit::threshold_sensitivity(corpus->value, scores->value, ts);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    csv << "threshold_a,threshold_b,r,p\n";
    const auto cell = [&](const irrkit::SensitivityCell& c) {
      csv << irrkit::io::format_real(c.threshold_a) << ',' << irrkit::io::format_real(c.threshold_b) << ',';
      if (c.correlation) {
        csv << irrkit::io::format_real(c.correlation->r) << ',' << irrkit::io::format_real(c.correlation->p);
      } else {
        csv << "nan,nan";
      }
      csv << '\n';
    };
    for (const auto& row : report.matrix) {
      for (const auto& c : row) cell(c);
    }
    write_text(dir / "sensitivity.csv", csv.str());

    if (labels_path) {
      need(ks, "ks");
      const auto labels = irrkit::IuLabelSet::load(labels_path);
      std::ostringstream grid;
      grid << "threshold,k,hits,recall,precision\n";
      for (std::size_t i = 0; i < ts.size(); ++i) {
        std::map<irrkit::UserId, double> counts;
        for (const auto& [u, n] : report.counts[i].counts) counts[u] = static_cast<double>(n);
        const auto ranking = irrkit::Ranking::from_scores("irr_count", counts);
        for (size_t k = 0; k < k_count; ++k) {
          const auto rec = irrkit::topk_recall(ranking, labels, ks[k]);
          const auto prec = irrkit::topk_precision(ranking, labels, ks[k]);
          grid << irrkit::io::format_real(ts[i]) << ',' << ks[k] << ',' << rec.hits << ','
               << irrkit::io::format_real(rec.value) << ',' << irrkit::io::format_real(prec.value) << '\n';
        }
      }
      write_text(dir / "eval_grid.csv", grid.str());
    }
  });
}

irr_status irr_features_write(const irr_corpus* corpus, const irr_scores* scores, const irr_lexicon* lexicon,
                              const char* options_json, const char* out_path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(scores, "scores");
    need(lexicon, "lexicon");
    need(out_path, "out_path");
    const auto options = parse_options(options_json, {"threshold", "topics", "clusters"});
    write_table(out_path, build_features(corpus->value, scores->value, lexicon->value, options));
  });
}

irr_status irr_generate(const char* config_json, const char* out_dir) {
  return guarded([&] {
    need(out_dir, "out_dir");
    json j = json::object();
    if (config_json && *config_json) {
      try {
        j = json::parse(config_json);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("synth config is not valid JSON: ") + e.what());
      }
    }
    const auto config = irrkit::synth_config_from_json(j);
    const auto output = irrkit::generate(config);
    irrkit::write_synth_output(out_dir, output);
  });
}

}  // extern "C"
