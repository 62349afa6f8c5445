// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "irb/analysis.hpp"
#include "irb/report_json.hpp"
#include "irb/storage.hpp"
#include "irb/train.hpp"

using irb::storage::ordered_json;

struct irb_dataset {
  irb::Dataset ds;
  ordered_json sidecar;  // synth.json contents, empty when absent
};

struct irb_model {
  irb::encoder::DualEncoderModel model;
};

struct irb_bias_report {
  irb::bias::BiasReport report;
};

struct irb_sweep {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::string>> csv_rows;
};

struct irb_analysis {
  irb::analysis::TransformSet tset;
  irb::analysis::ReverseResult reverse;
  std::map<std::string, double> scalars;
};

namespace {

thread_local std::string g_last_error;

irb_status to_status(irb::Errc code) {
  return static_cast<irb_status>(static_cast<int>(code));
}

template <typename Fn>
irb_status guarded(Fn&& fn) {
  try {
    fn();
    return IRB_OK;
  } catch (const irb::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IRB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IRB_ERR_INTERNAL;
  }
}

irb_status bad_argument(const char* what) {
  g_last_error = what;
  return IRB_ERR_INVALID_ARGUMENT;
}

irb::ranking::MetricKind to_kind(irb_metric_kind kind) {
  return kind == IRB_METRIC_NDCG ? irb::ranking::MetricKind::NDCG
                                 : irb::ranking::MetricKind::Recall;
}

irb::train::TrainConfig to_train_config(const irb_train_params& p) {
  irb::train::TrainConfig cfg;
  cfg.epochs = p.epochs;
  cfg.batch_size = p.batch_size;
  cfg.learning_rate = p.learning_rate;
  cfg.momentum = p.momentum;
  cfg.beta = p.beta;
  cfg.temperature = p.temperature;
  cfg.seed = irb::Seed{p.seed};
  cfg.penalty_mode = p.penalty_mode == IRB_PENALTY_INDICATOR_RAW
                         ? irb::train::PenaltyMode::indicator_raw
                         : irb::train::PenaltyMode::indicator_hinge;
  cfg.d_out = p.d_out;
  cfg.hidden_dim = p.hidden_dim;
  cfg.holdout_fraction = p.holdout_fraction;
  return cfg;
}

// Tables after the optional model's heads; identity evaluation passes the
// loaded (already normalized) tables straight through.
struct EncodedTables {
  irb::EmbeddingTable qry;
  irb::EmbeddingTable img;
};

EncodedTables encode_tables(const irb_dataset& ds, const irb_model* model) {
  if (!model) return {ds.ds.qry_table, ds.ds.img_table};
  return {irb::encoder::encode_table(model->model.query_head, ds.ds.qry_table),
          irb::encoder::encode_table(model->model.image_head,
                                     ds.ds.img_table)};
}

std::vector<irb::ranking::MetricSpec> specs_for_cutoffs(
    const uint32_t* cutoffs, size_t num_cutoffs) {
  std::vector<irb::ranking::MetricSpec> specs;
  for (size_t i = 0; i < num_cutoffs; ++i) {
    if (cutoffs[i] == 0) {
      irb::throw_error(irb::Errc::invalid_argument, "cutoff must be >= 1");
    }
    specs.push_back({irb::ranking::MetricKind::NDCG, cutoffs[i]});
  }
  for (size_t i = 0; i < num_cutoffs; ++i) {
    specs.push_back({irb::ranking::MetricKind::Recall, cutoffs[i]});
  }
  return specs;
}

ordered_json parse_config_json(const char* config_json) {
  if (!config_json || !*config_json) return ordered_json(nullptr);
  try {
    return ordered_json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    irb::throw_error(irb::Errc::parse,
                     std::string("config_json: ") + e.what());
  }
}

void append_sweep_row(irb_sweep& sweep, double head,
                      const irb::bias::BiasReport& report,
                      const std::vector<double>& tail) {
  std::vector<double> row{head};
  for (irb::ranking::MetricKind kind :
       {irb::ranking::MetricKind::NDCG, irb::ranking::MetricKind::Recall}) {
    for (unsigned k : {1u, 3u, 5u}) {
      const irb::bias::BiasEntry& e = report.entry(kind, k);
      row.push_back(e.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                 : e.relative_delta);
    }
  }
  row.insert(row.end(), tail.begin(), tail.end());
  sweep.values.push_back(std::move(row));
}

}  // namespace

extern "C" {

const char* irb_version(void) { return "0.1.0"; }

const char* irb_status_name(irb_status status) {
  switch (status) {
    case IRB_OK: return "ok";
    case IRB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IRB_ERR_DIM_MISMATCH: return "dimension mismatch";
    case IRB_ERR_ZERO_VECTOR: return "zero vector";
    case IRB_ERR_IO: return "i/o failure";
    case IRB_ERR_BAD_MAGIC: return "bad magic";
    case IRB_ERR_LENGTH_MISMATCH: return "length mismatch";
    case IRB_ERR_PARSE: return "parse error";
    case IRB_ERR_VALIDATION: return "validation failed";
    case IRB_ERR_ITEM_NOT_FOUND: return "item not found";
    case IRB_ERR_EMPTY_SELECTION: return "empty selection";
    case IRB_ERR_DEGENERATE: return "degenerate input";
    case IRB_ERR_MISSING_COUNTERPART: return "missing counterpart";
    case IRB_ERR_BATCH_TOO_SMALL: return "batch too small";
    case IRB_ERR_TOO_FEW_VECTORS: return "too few vectors";
    case IRB_ERR_EMPTY_CANDIDATES: return "empty candidate set";
    case IRB_ERR_NONFINITE: return "non-finite value";
    case IRB_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* irb_last_error(void) { return g_last_error.c_str(); }

irb_status irb_dataset_synth(const irb_synth_params* params,
                             irb_dataset** out) {
  if (!params || !out) return bad_argument("null argument");
  return guarded([&] {
    irb::synth::SynthConfig cfg;
    cfg.num_queries = params->num_queries;
    cfg.dim = params->dim;
    cfg.sigma_q = params->sigma_q;
    cfg.lambda = params->lambda;
    cfg.gamma = params->gamma;
    cfg.seed = irb::Seed{params->seed};
    irb::synth::SynthDataset synth = irb::synth::synthesize(cfg);

    auto* handle = new irb_dataset;
    handle->ds = std::move(synth.dataset);

    ordered_json config;
    config["num_queries"] = cfg.num_queries;
    config["dim"] = cfg.dim;
    config["sigma_q"] = cfg.sigma_q;
    config["lambda"] = cfg.lambda;
    config["gamma"] = cfg.gamma;
    config["seed"] = cfg.seed.value;
    handle->sidecar["config"] = std::move(config);
    ordered_json wm = ordered_json::array();
    for (Eigen::Index i = 0; i < synth.watermark.size(); ++i) {
      wm.push_back(synth.watermark[i]);
    }
    handle->sidecar["watermark"] = std::move(wm);
    *out = handle;
  });
}

irb_status irb_dataset_load(const char* dir, irb_dataset** out) {
  if (!dir || !out) return bad_argument("null argument");
  return guarded([&] {
    auto* handle = new irb_dataset;
    try {
      handle->ds = irb::storage::load_dataset(dir);
      const auto sidecar = std::filesystem::path(dir) / "synth.json";
      if (std::filesystem::exists(sidecar)) {
        handle->sidecar = irb::storage::read_report(sidecar);
      }
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

irb_status irb_dataset_save(const irb_dataset* ds, const char* dir) {
  if (!ds || !dir) return bad_argument("null argument");
  return guarded([&] {
    const ordered_json* sidecar =
        ds->sidecar.is_null() || ds->sidecar.empty() ? nullptr : &ds->sidecar;
    irb::storage::save_dataset(ds->ds, dir, sidecar);
  });
}

void irb_dataset_free(irb_dataset* ds) { delete ds; }

uint32_t irb_dataset_num_queries(const irb_dataset* ds) {
  return ds ? static_cast<uint32_t>(ds->ds.queries.size()) : 0;
}

uint32_t irb_dataset_num_items(const irb_dataset* ds) {
  return ds ? static_cast<uint32_t>(ds->ds.items.size()) : 0;
}

uint32_t irb_dataset_dim(const irb_dataset* ds) {
  return ds ? static_cast<uint32_t>(ds->ds.img_table.dim()) : 0;
}

int irb_dataset_has_watermark(const irb_dataset* ds) {
  return ds && ds->ds.watermark ? 1 : 0;
}

irb_status irb_model_identity(uint32_t dim, double temperature,
                              irb_model** out) {
  if (!out) return bad_argument("null argument");
  return guarded([&] {
    auto* handle = new irb_model;
    try {
      handle->model =
          irb::encoder::init_model(dim, dim, dim, irb::Seed{0}, {0, true});
      handle->model.temperature = temperature;
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

irb_status irb_model_load(const char* path, irb_model** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] {
    auto* handle = new irb_model;
    try {
      handle->model = irb::encoder::load_model(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

irb_status irb_model_save(const irb_model* model, const char* path) {
  if (!model || !path) return bad_argument("null argument");
  return guarded([&] { irb::encoder::save_model(model->model, path); });
}

void irb_model_free(irb_model* model) { delete model; }

irb_status irb_eval_bias(const irb_dataset* ds, const irb_model* model,
                         const uint32_t* cutoffs, size_t num_cutoffs,
                         irb_bias_report** out) {
  if (!ds || !out || (!cutoffs && num_cutoffs)) {
    return bad_argument("null argument");
  }
  return guarded([&] {
    const std::vector<irb::ranking::MetricSpec> specs =
        num_cutoffs ? specs_for_cutoffs(cutoffs, num_cutoffs)
                    : irb::ranking::default_specs();
    const EncodedTables tables = encode_tables(*ds, model);
    auto* handle = new irb_bias_report;
    try {
      handle->report = irb::bias::evaluate_bias(ds->ds.queries, ds->ds.items,
                                                tables.qry, tables.img, specs);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

irb_status irb_bias_report_metric(const irb_bias_report* report,
                                  irb_metric_kind kind, uint32_t k,
                                  double* metric_real,
                                  double* metric_generated,
                                  double* relative_delta) {
  if (!report) return bad_argument("null argument");
  return guarded([&] {
    const irb::bias::BiasEntry& e = report->report.entry(to_kind(kind), k);
    if (metric_real) *metric_real = e.metric_real;
    if (metric_generated) *metric_generated = e.metric_generated;
    if (relative_delta) {
      *relative_delta = e.degenerate
                            ? std::numeric_limits<double>::quiet_NaN()
                            : e.relative_delta;
    }
  });
}

irb_status irb_bias_report_write_json(const irb_bias_report* report,
                                      const char* config_json,
                                      const char* path) {
  if (!report || !path) return bad_argument("null argument");
  return guarded([&] {
    ordered_json doc;
    const ordered_json config = parse_config_json(config_json);
    if (!config.is_null()) doc["config"] = config;
    doc.update(irb::report::bias_report_json(report->report));
    irb::storage::write_report(doc, path);
  });
}

void irb_bias_report_free(irb_bias_report* report) { delete report; }

irb_status irb_write_score_distribution(const irb_dataset* ds,
                                        const irb_model* model, uint32_t bins,
                                        const char* csv_path,
                                        const char* svg_path) {
  if (!ds || !csv_path) return bad_argument("null argument");
  return guarded([&] {
    const EncodedTables tables = encode_tables(*ds, model);
    const irb::bias::ScoreDistribution dist = irb::bias::score_distribution(
        ds->ds.queries, ds->ds.items, tables.qry, tables.img, bins);
    irb::storage::write_csv(csv_path,
                            {"bin_center", "count_real", "count_generated"},
                            irb::report::distribution_csv_rows(dist));
    if (svg_path) {
      irb::storage::write_histogram_svg(dist.edges, dist.counts_real,
                                        dist.counts_generated, "real",
                                        "generated", svg_path);
    }
  });
}

void irb_train_params_init(irb_train_params* params) {
  if (!params) return;
  params->epochs = 30;
  params->batch_size = 64;
  params->learning_rate = 1e-2;
  params->momentum = 0.9;
  params->beta = 0.0;
  params->temperature = 0.05;
  params->seed = 0;
  params->penalty_mode = IRB_PENALTY_INDICATOR_HINGE;
  params->d_out = 0;
  params->hidden_dim = 0;
  params->holdout_fraction = 0.2;
  params->alpha = 0.0;
}

irb_status irb_train(const irb_dataset* ds, const irb_train_params* params,
                     const char* trace_csv_path, irb_model** out) {
  if (!ds || !params || !out) return bad_argument("null argument");
  return guarded([&] {
    const irb::train::TrainConfig cfg = to_train_config(*params);
    const irb::train::PreparedRun run =
        irb::train::prepare_run(ds->ds, params->alpha, cfg);
    irb::train::TrainResult result =
        irb::train::train(ds->ds, run.pairs, run.triples, run.holdout, cfg);
    if (trace_csv_path) {
      irb::storage::write_csv(trace_csv_path, irb::report::trace_columns(),
                              irb::report::trace_csv_rows(result.trace));
    }
    auto* handle = new irb_model;
    handle->model = std::move(result.model);
    *out = handle;
  });
}

irb_status irb_sweep_alpha(const irb_dataset* ds,
                           const irb_train_params* params,
                           const double* alphas, size_t num_alphas,
                           uint32_t jobs, irb_sweep** out) {
  if (!ds || !params || !alphas || !num_alphas || !out) {
    return bad_argument("null argument");
  }
  return guarded([&] {
    const irb::train::TrainConfig cfg = to_train_config(*params);
    const std::vector<double> alpha_list(alphas, alphas + num_alphas);
    const std::vector<irb::train::SweepAlphaRow> rows =
        irb::train::sweep_alpha(ds->ds, alpha_list, cfg,
                                jobs ? jobs : 1);
    auto* handle = new irb_sweep;
    handle->columns = irb::report::sweep_alpha_columns();
    handle->csv_rows = irb::report::sweep_alpha_csv_rows(rows);
    for (const irb::train::SweepAlphaRow& r : rows) {
      append_sweep_row(*handle, r.alpha, r.report,
                       {r.ndcg_real_only, r.ndcg_generated_only});
    }
    *out = handle;
  });
}

irb_status irb_sweep_beta(const irb_dataset* ds, const irb_train_params* params,
                          const double* betas, size_t num_betas, uint32_t jobs,
                          const char* distributions_dir, irb_sweep** out) {
  if (!ds || !params || !betas || !num_betas || !out) {
    return bad_argument("null argument");
  }
  return guarded([&] {
    const irb::train::TrainConfig cfg = to_train_config(*params);
    const std::vector<double> beta_list(betas, betas + num_betas);
    const std::vector<irb::train::SweepBetaRow> rows =
        irb::train::sweep_beta(ds->ds, beta_list, cfg, jobs ? jobs : 1);
    if (distributions_dir) {
      std::filesystem::create_directories(distributions_dir);
      for (const irb::train::SweepBetaRow& r : rows) {
        const std::string name =
            "distribution_beta_" + irb::storage::fmt_g6(r.beta * 100.0) +
            ".csv";
        irb::storage::write_csv(
            std::filesystem::path(distributions_dir) / name,
            {"bin_center", "count_real", "count_generated"},
            irb::report::distribution_csv_rows(r.distribution));
      }
    }
    auto* handle = new irb_sweep;
    handle->columns = irb::report::sweep_beta_columns();
    handle->csv_rows = irb::report::sweep_beta_csv_rows(rows);
    for (const irb::train::SweepBetaRow& r : rows) {
      append_sweep_row(*handle, r.beta, r.report, {r.ndcg_real_only});
    }
    *out = handle;
  });
}

size_t irb_sweep_rows(const irb_sweep* sweep) {
  return sweep ? sweep->values.size() : 0;
}

irb_status irb_sweep_value(const irb_sweep* sweep, size_t row,
                           const char* column, double* out) {
  if (!sweep || !column || !out) return bad_argument("null argument");
  if (row >= sweep->values.size()) return bad_argument("row out of range");
  for (std::size_t c = 0; c < sweep->columns.size(); ++c) {
    if (sweep->columns[c] == column) {
      *out = sweep->values[row][c];
      return IRB_OK;
    }
  }
  g_last_error = std::string("unknown sweep column '") + column + "'";
  return IRB_ERR_ITEM_NOT_FOUND;
}

irb_status irb_sweep_write_csv(const irb_sweep* sweep, const char* path) {
  if (!sweep || !path) return bad_argument("null argument");
  return guarded([&] {
    irb::storage::write_csv(path, sweep->columns, sweep->csv_rows);
  });
}

irb_status irb_sweep_write_json(const irb_sweep* sweep,
                                const char* config_json, const char* path) {
  if (!sweep || !path) return bad_argument("null argument");
  return guarded([&] {
    ordered_json doc;
    const ordered_json config = parse_config_json(config_json);
    if (!config.is_null()) doc["config"] = config;
    ordered_json cols = ordered_json::array();
    for (const std::string& c : sweep->columns) cols.push_back(c);
    doc["columns"] = std::move(cols);
    ordered_json rows = ordered_json::array();
    for (const auto& row : sweep->values) {
      ordered_json r = ordered_json::array();
      for (double v : row) {
        r.push_back(std::isfinite(v) ? ordered_json(v)
                                     : ordered_json(nullptr));
      }
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    irb::storage::write_report(doc, path);
  });
}

void irb_sweep_free(irb_sweep* sweep) { delete sweep; }

irb_status irb_parity(const irb_dataset* ds, const irb_model* model,
                      irb_metric_kind kind, uint32_t k,
                      double* metric_real_only,
                      double* metric_generated_only, double* abs_gap) {
  if (!ds) return bad_argument("null argument");
  return guarded([&] {
    const EncodedTables tables = encode_tables(*ds, model);
    std::vector<irb::CorpusItem> real_items, generated_items;
    for (const irb::CorpusItem& item : ds->ds.items) {
      if (item.provenance == irb::Provenance::Real) {
        real_items.push_back(item);
      } else if (item.provenance == irb::Provenance::Generated) {
        generated_items.push_back(item);
      }
    }
    const irb::bias::ParityResult result = irb::bias::parity_check(
        ds->ds.queries, real_items, generated_items, tables.qry, tables.img,
        {to_kind(kind), k});
    if (metric_real_only) *metric_real_only = result.metric_real_only;
    if (metric_generated_only) {
      *metric_generated_only = result.metric_generated_only;
    }
    if (abs_gap) *abs_gap = result.abs_gap;
  });
}

irb_status irb_select_candidate(const char* real_emb_path, uint32_t real_row,
                                const char* candidates_emb_path,
                                uint32_t* out_index, double* out_similarity) {
  if (!real_emb_path || !candidates_emb_path || !out_index) {
    return bad_argument("null argument");
  }
  return guarded([&] {
    const irb::EmbeddingTable ref_table =
        irb::l2_normalize(irb::storage::read_embeddings(real_emb_path));
    const irb::EmbeddingTable cand_table =
        irb::l2_normalize(irb::storage::read_embeddings(candidates_emb_path));
    if (real_row >= ref_table.rows()) {
      irb::throw_error(irb::Errc::invalid_argument,
                       "reference row out of range");
    }
    if (ref_table.dim() != cand_table.dim()) {
      irb::throw_error(irb::Errc::dim_mismatch,
                       "reference and candidate tables differ in dim");
    }
    // Stack the reference row on top of the candidates so the selection
    // operates on a single table.
    irb::EmbeddingTable combined(cand_table.rows() + 1, cand_table.dim());
    combined.data.row(0) =
        ref_table.data.row(static_cast<Eigen::Index>(real_row));
    combined.data.bottomRows(cand_table.data.rows()) = cand_table.data;
    combined.normalized = true;

    irb::bias::CandidateSet cset;
    cset.real_row = 0;
    cset.candidate_rows.resize(cand_table.rows());
    for (std::size_t i = 0; i < cand_table.rows(); ++i) {
      cset.candidate_rows[i] = i + 1;
    }
    const std::size_t chosen = irb::bias::select_candidate(cset, combined);
    *out_index = static_cast<uint32_t>(chosen);
    if (out_similarity) {
      *out_similarity = irb::ranking::score(
          combined.row_ptr(0), combined.row_ptr(chosen + 1), combined.dim());
    }
  });
}

irb_status irb_analyze(const irb_dataset* ds, const irb_model* original,
                       const irb_model* debiased, irb_reverse_mode mode,
                       int apply_plus_p, irb_analysis** out) {
  if (!ds || !original || !debiased || !out) {
    return bad_argument("null argument");
  }
  return guarded([&] {
    auto* handle = new irb_analysis;
    try {
      handle->tset = irb::analysis::extract_transforms(
          original->model, debiased->model, ds->ds.items, ds->ds.img_table);
      const irb::analysis::AggregationResult agg =
          irb::analysis::aggregation_check(handle->tset);
      handle->reverse = irb::analysis::reverse_transform_eval(
          original->model, handle->tset, ds->ds,
          irb::ranking::default_specs(),
          mode == IRB_REVERSE_PAIRED ? irb::analysis::ReverseMode::paired
                                     : irb::analysis::ReverseMode::mean,
          apply_plus_p ? 1.0 : -1.0);

      handle->scalars["dispersion"] = handle->tset.dispersion;
      handle->scalars["baseline_dispersion"] =
          handle->tset.baseline_dispersion;
      handle->scalars["margin"] = agg.margin;
      handle->scalars["aggregated"] = agg.aggregated ? 1.0 : 0.0;
      handle->scalars["degenerate"] = handle->tset.degenerate ? 1.0 : 0.0;
      const auto delta_of = [](const irb::bias::BiasReport& r) {
        const irb::bias::BiasEntry& e =
            r.entry(irb::ranking::MetricKind::NDCG, 1);
        return e.degenerate ? std::numeric_limits<double>::quiet_NaN()
                            : e.relative_delta;
      };
      handle->scalars["delta_ndcg1_before"] = delta_of(handle->reverse.before);
      handle->scalars["delta_ndcg1_after"] = delta_of(handle->reverse.after);
      if (ds->ds.watermark) {
        bool degenerate = false;
        handle->scalars["oracle_alignment"] = irb::analysis::oracle_alignment(
            handle->tset, *ds->ds.watermark, debiased->model.image_head,
            &degenerate);
        if (degenerate) handle->scalars["oracle_alignment"] = 0.0;
      } else {
        handle->scalars["oracle_alignment"] = -1.0;
      }
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

irb_status irb_analysis_value(const irb_analysis* analysis, const char* key,
                              double* out) {
  if (!analysis || !key || !out) return bad_argument("null argument");
  auto it = analysis->scalars.find(key);
  if (it == analysis->scalars.end()) {
    g_last_error = std::string("unknown analysis key '") + key + "'";
    return IRB_ERR_ITEM_NOT_FOUND;
  }
  *out = it->second;
  return IRB_OK;
}

irb_status irb_analysis_write(const irb_analysis* analysis,
                              const char* config_json, const char* dir) {
  if (!analysis || !dir) return bad_argument("null argument");
  return guarded([&] {
    const std::filesystem::path out_dir(dir);
    std::filesystem::create_directories(out_dir);

    ordered_json doc;
    const ordered_json config = parse_config_json(config_json);
    if (!config.is_null()) doc["config"] = config;
    doc["transforms"] = irb::report::transform_set_json(analysis->tset);
    for (const char* key :
         {"margin", "aggregated", "delta_ndcg1_before", "delta_ndcg1_after",
          "oracle_alignment"}) {
      doc[key] = analysis->scalars.at(key);
    }
    doc["bias_before"] = irb::report::bias_report_json(analysis->reverse.before);
    doc["bias_after"] = irb::report::bias_report_json(analysis->reverse.after);
    irb::storage::write_report(doc, out_dir / "analysis.json");

    irb::storage::write_csv(out_dir / "projection.csv",
                            {"family", "item", "x", "y"},
                            irb::report::projection_csv_rows(analysis->tset));
  });
}

void irb_analysis_free(irb_analysis* analysis) { delete analysis; }

}  // extern "C"
