#ifndef IRRKIT_IRRKIT_H
#define IRRKIT_IRRKIT_H

#include <stddef.h>

#if defined(_WIN32)
#define IRR_API __declspec(dllexport)
#else
#define IRR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum irr_status {
  IRR_OK = 0,
  IRR_ERR_INVALID_ARGUMENT = 1,
  IRR_ERR_IO = 2,
  IRR_ERR_PARSE = 3,
  IRR_ERR_VALIDATION = 4,
  IRR_ERR_CONFIG = 5,
  IRR_ERR_NUMERIC = 6,
  IRR_ERR_NOT_FOUND = 7,
  IRR_ERR_INTERNAL = 8
} irr_status;

typedef struct irr_corpus irr_corpus;
typedef struct irr_lexicon irr_lexicon;
typedef struct irr_model irr_model;
typedef struct irr_scores irr_scores;

IRR_API const char* irr_version(void);
/* Short name such as "parse" or "not_found". */
IRR_API const char* irr_status_name(irr_status status);
/* Message of the last failure on the calling thread; "" after success. */
IRR_API const char* irr_last_error(void);
/* Frees strings returned through char** out-parameters. */
IRR_API void irr_string_free(char* s);

/* ---- corpus ---- */

/* *report receives the validation report text whether or not ingestion
   succeeded (pass NULL to skip). A dirty report yields IRR_ERR_VALIDATION. */
IRR_API irr_status irr_corpus_ingest(const char* path, irr_corpus** out, char** report);
IRR_API irr_status irr_corpus_load(const char* path, irr_corpus** out);
IRR_API irr_status irr_corpus_save(const irr_corpus* corpus, const char* path);
IRR_API size_t irr_corpus_thread_count(const irr_corpus* corpus);
IRR_API size_t irr_corpus_post_count(const irr_corpus* corpus);
IRR_API size_t irr_corpus_user_count(const irr_corpus* corpus);
IRR_API void irr_corpus_free(irr_corpus* corpus);

/* ---- lexicons ---- */

IRR_API irr_status irr_lexicon_builtin(irr_lexicon** out);
IRR_API irr_status irr_lexicon_load(const char* dir, irr_lexicon** out);
IRR_API void irr_lexicon_free(irr_lexicon* lexicon);

/* ---- sentiment ---- */

/* options_json keys: model ("adaboost-stumps" | "logistic" | "decision-tree"),
   rounds, seed, folds, tree_depth, l2, features (list of feature names),
   select_features (bool). *cv_report receives a JSON document. */
IRR_API irr_status irr_sentiment_train(const irr_corpus* corpus, const irr_lexicon* lexicon,
                                       const char* labels_path, const char* options_json,
                                       irr_model** out, char** cv_report);
IRR_API irr_status irr_model_load(const char* path, irr_model** out);
IRR_API irr_status irr_model_save(const irr_model* model, const char* path);
IRR_API void irr_model_free(irr_model* model);

IRR_API irr_status irr_score_posts(const irr_corpus* corpus, const irr_model* model,
                                   const irr_lexicon* lexicon, double threshold,
                                   irr_scores** out);
IRR_API irr_status irr_scores_load(const char* path, double threshold, irr_scores** out);
IRR_API irr_status irr_scores_save(const irr_scores* scores, const irr_corpus* corpus,
                                   const char* path);
IRR_API irr_status irr_scores_posterior(const irr_scores* scores, const char* post_id,
                                        double* out);
IRR_API void irr_scores_free(irr_scores* scores);

/* ---- analyses writing files ---- */

/* options_json keys: threshold, bins. Writes position.csv,
   delta_vs_reply.csv, negative_start_hist.csv, interval_first_cdf.csv,
   interval_last_cdf.csv and stats.json into out_dir. */
IRR_API irr_status irr_dynamics_write(const irr_corpus* corpus, const irr_scores* scores,
                                      const char* options_json, const char* out_dir);

/* Ranks users by one of: threads_initiated, total_posts, in_degree,
   out_degree, betweenness, pagerank, early_replies_24h, irr_count. scores may
   be NULL unless the metric is irr_count. options_json keys: threshold,
   restrict_eligible. */
IRR_API irr_status irr_rank_metric(const irr_corpus* corpus, const irr_scores* scores,
                                   const char* metric, const char* options_json,
                                   const char* out_path);

/* Ranks users by the cross-validated probability of a user classifier.
   options_json keys: model ("naive-bayes" | "logistic" | "random-forest" |
   "ensemble" | "ensemble+irr"), threshold, folds, seed, trees, topics (path),
   clusters (path), features_out (path). */
IRR_API irr_status irr_rank_model(const irr_corpus* corpus, const irr_scores* scores,
                                  const irr_lexicon* lexicon, const char* labels_path,
                                  const char* options_json, const char* out_path);

/* *report receives the evaluation JSON. */
IRR_API irr_status irr_evaluate(const char* const* ranking_paths, size_t ranking_count,
                                const char* labels_path, const size_t* ks, size_t k_count,
                                char** report);

/* Writes sensitivity.csv (pairwise correlations of per-user IRR counts) and,
   when labels_path is not NULL, eval_grid.csv with top-K recall per threshold. */
IRR_API irr_status irr_sensitivity(const irr_corpus* corpus, const irr_scores* scores,
                                   const double* thresholds, size_t threshold_count,
                                   const char* labels_path, const size_t* ks, size_t k_count,
                                   const char* out_dir);

/* Writes the per-user feature table. options_json keys: threshold, topics,
   clusters. */
IRR_API irr_status irr_features_write(const irr_corpus* corpus, const irr_scores* scores,
                                      const irr_lexicon* lexicon, const char* options_json,
                                      const char* out_path);

/* config_json holds synthetic-corpus settings; unknown keys are rejected. */
IRR_API irr_status irr_generate(const char* config_json, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
