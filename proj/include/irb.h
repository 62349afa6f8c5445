/* Copyright (c) 2026 The irb Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the irb library: measuring and mitigating source bias in
 * dual-encoder cross-modal retrieval over corpora mixing real and
 * AI-generated items. All state lives behind opaque handles; every function
 * that can fail returns an irb_status and leaves a message retrievable via
 * irb_last_error().
 */

#ifndef IRB_H
#define IRB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IRB_API __declspec(dllexport)
#else
#define IRB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum irb_status {
  IRB_OK = 0,
  IRB_ERR_INVALID_ARGUMENT = 1,
  IRB_ERR_DIM_MISMATCH = 2,
  IRB_ERR_ZERO_VECTOR = 3,
  IRB_ERR_IO = 4,
  IRB_ERR_BAD_MAGIC = 5,
  IRB_ERR_LENGTH_MISMATCH = 6,
  IRB_ERR_PARSE = 7,
  IRB_ERR_VALIDATION = 8,
  IRB_ERR_ITEM_NOT_FOUND = 9,
  IRB_ERR_EMPTY_SELECTION = 10,
  IRB_ERR_DEGENERATE = 11,
  IRB_ERR_MISSING_COUNTERPART = 12,
  IRB_ERR_BATCH_TOO_SMALL = 13,
  IRB_ERR_TOO_FEW_VECTORS = 14,
  IRB_ERR_EMPTY_CANDIDATES = 15,
  IRB_ERR_NONFINITE = 16,
  IRB_ERR_INTERNAL = 17
} irb_status;

typedef enum irb_metric_kind {
  IRB_METRIC_NDCG = 0,
  IRB_METRIC_RECALL = 1
} irb_metric_kind;

typedef enum irb_penalty_mode {
  IRB_PENALTY_INDICATOR_HINGE = 0,
  IRB_PENALTY_INDICATOR_RAW = 1
} irb_penalty_mode;

typedef enum irb_reverse_mode {
  IRB_REVERSE_MEAN = 0,
  IRB_REVERSE_PAIRED = 1
} irb_reverse_mode;

typedef struct irb_dataset irb_dataset;
typedef struct irb_model irb_model;
typedef struct irb_bias_report irb_bias_report;
typedef struct irb_sweep irb_sweep;
typedef struct irb_analysis irb_analysis;

IRB_API const char* irb_version(void);
IRB_API const char* irb_status_name(irb_status status);
/* Message for the most recent failure on this thread; empty until one. */
IRB_API const char* irb_last_error(void);

/* ---- datasets ----------------------------------------------------------- */

typedef struct irb_synth_params {
  uint32_t num_queries;
  uint32_t dim;
  double sigma_q;  /* image noise spread around the query direction */
  double lambda;   /* watermark strength */
  double gamma;    /* watermark share along the mean query direction, [0,1] */
  uint64_t seed;
} irb_synth_params;

IRB_API irb_status irb_dataset_synth(const irb_synth_params* params,
                                     irb_dataset** out);
/* Directory layout: queries.emb, images.emb, metadata.jsonl, and an
 * optional synth.json sidecar carrying the ground-truth watermark. */
IRB_API irb_status irb_dataset_load(const char* dir, irb_dataset** out);
IRB_API irb_status irb_dataset_save(const irb_dataset* ds, const char* dir);
IRB_API void irb_dataset_free(irb_dataset* ds);

IRB_API uint32_t irb_dataset_num_queries(const irb_dataset* ds);
IRB_API uint32_t irb_dataset_num_items(const irb_dataset* ds);
IRB_API uint32_t irb_dataset_dim(const irb_dataset* ds);
IRB_API int irb_dataset_has_watermark(const irb_dataset* ds);

/* ---- models ------------------------------------------------------------- */

IRB_API irb_status irb_model_identity(uint32_t dim, double temperature,
                                      irb_model** out);
IRB_API irb_status irb_model_load(const char* path, irb_model** out);
IRB_API irb_status irb_model_save(const irb_model* model, const char* path);
IRB_API void irb_model_free(irb_model* model);

/* ---- bias evaluation ----------------------------------------------------- */

/* model == NULL evaluates the raw (identity-encoded) tables. cutoffs are
 * applied to both NDCG and Recall. */
IRB_API irb_status irb_eval_bias(const irb_dataset* ds, const irb_model* model,
                                 const uint32_t* cutoffs, size_t num_cutoffs,
                                 irb_bias_report** out);
/* relative_delta is NaN for the degenerate both-zero case. */
IRB_API irb_status irb_bias_report_metric(const irb_bias_report* report,
                                          irb_metric_kind kind, uint32_t k,
                                          double* metric_real,
                                          double* metric_generated,
                                          double* relative_delta);
/* config_json (nullable) is embedded under the "config" key. */
IRB_API irb_status irb_bias_report_write_json(const irb_bias_report* report,
                                              const char* config_json,
                                              const char* path);
IRB_API void irb_bias_report_free(irb_bias_report* report);

/* Histogram CSV (bin_center, count_real, count_generated) plus an optional
 * SVG rendering of the same bins. */
IRB_API irb_status irb_write_score_distribution(const irb_dataset* ds,
                                                const irb_model* model,
                                                uint32_t bins,
                                                const char* csv_path,
                                                const char* svg_path);

/* ---- training ------------------------------------------------------------ */

typedef struct irb_train_params {
  uint32_t epochs;
  uint32_t batch_size;
  double learning_rate;
  double momentum;
  double beta;         /* Bernoulli sampling probability for the penalty */
  double temperature;
  uint64_t seed;
  irb_penalty_mode penalty_mode;
  uint32_t d_out;      /* 0 = keep the input dimension */
  uint32_t hidden_dim; /* 0 = linear heads */
  double holdout_fraction;
  double alpha;        /* percentage of captions paired with generated images */
} irb_train_params;

/* Sensible defaults for every field. */
IRB_API void irb_train_params_init(irb_train_params* params);

/* Trains on the non-holdout captions; when trace_csv_path is non-NULL the
 * per-epoch loss and held-out bias trace is written there. */
IRB_API irb_status irb_train(const irb_dataset* ds,
                             const irb_train_params* params,
                             const char* trace_csv_path, irb_model** out);

/* Sweep results are tables addressed by column name:
 *   alpha sweep: alpha, delta_ndcg1..5, delta_recall1..5,
 *                ndcg5_real_only, ndcg5_generated_only
 *   beta sweep:  beta, the same delta columns, ndcg5_real_only
 */
IRB_API irb_status irb_sweep_alpha(const irb_dataset* ds,
                                   const irb_train_params* params,
                                   const double* alphas, size_t num_alphas,
                                   uint32_t jobs, irb_sweep** out);
/* distributions_dir (nullable): per-beta score histogram CSVs. */
IRB_API irb_status irb_sweep_beta(const irb_dataset* ds,
                                  const irb_train_params* params,
                                  const double* betas, size_t num_betas,
                                  uint32_t jobs, const char* distributions_dir,
                                  irb_sweep** out);
IRB_API size_t irb_sweep_rows(const irb_sweep* sweep);
IRB_API irb_status irb_sweep_value(const irb_sweep* sweep, size_t row,
                                   const char* column, double* out);
IRB_API irb_status irb_sweep_write_csv(const irb_sweep* sweep,
                                       const char* path);
IRB_API irb_status irb_sweep_write_json(const irb_sweep* sweep,
                                        const char* config_json,
                                        const char* path);
IRB_API void irb_sweep_free(irb_sweep* sweep);

/* ---- parity and candidate selection -------------------------------------- */

IRB_API irb_status irb_parity(const irb_dataset* ds, const irb_model* model,
                              irb_metric_kind kind, uint32_t k,
                              double* metric_real_only,
                              double* metric_generated_only, double* abs_gap);

/* Picks the candidate row most similar to the reference row. Both files are
 * EMB1; tables must share the dimension. */
IRB_API irb_status irb_select_candidate(const char* real_emb_path,
                                        uint32_t real_row,
                                        const char* candidates_emb_path,
                                        uint32_t* out_index,
                                        double* out_similarity);

/* ---- cause analysis ------------------------------------------------------ */

/* Extracts the per-item transformations between the two image encoders,
 * checks their aggregation, runs the reverse-transformation evaluation
 * (p_sign = -1, or +1 when apply_plus_p is set) and, when the dataset has a
 * ground-truth watermark, the alignment oracle. Scalar results are addressed
 * by key: dispersion, baseline_dispersion, margin, aggregated (0/1),
 * delta_ndcg1_before, delta_ndcg1_after, oracle_alignment (-1 when absent),
 * degenerate (0/1). */
IRB_API irb_status irb_analyze(const irb_dataset* ds, const irb_model* original,
                               const irb_model* debiased, irb_reverse_mode mode,
                               int apply_plus_p, irb_analysis** out);
IRB_API irb_status irb_analysis_value(const irb_analysis* analysis,
                                      const char* key, double* out);
/* Writes report.json (config embedded), projection.csv, and the before and
 * after bias reports under dir. */
IRB_API irb_status irb_analysis_write(const irb_analysis* analysis,
                                      const char* config_json, const char* dir);
IRB_API void irb_analysis_free(irb_analysis* analysis);

#ifdef __cplusplus
}
#endif

#endif /* IRB_H */
