// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/report_json.hpp"

#include <cmath>

namespace irb::report {

namespace {

std::string spec_label(const ranking::MetricSpec& spec) {
  return std::string(ranking::metric_name(spec.kind)) + "@" +
         std::to_string(spec.k);
}

std::string g6(double v) { return storage::fmt_g6(v); }

}  // namespace

ordered_json bias_report_json(const bias::BiasReport& report) {
  ordered_json doc;
  doc["query_count"] = report.query_count;
  doc["real_count"] = report.real_count;
  doc["generated_count"] = report.generated_count;
  ordered_json metrics = ordered_json::array();
  for (const bias::BiasEntry& e : report.entries) {
    ordered_json entry;
    entry["metric"] = spec_label(e.spec);
    entry["metric_real"] = e.metric_real;
    entry["metric_generated"] = e.metric_generated;
    entry["relative_delta"] = e.degenerate
                                  ? ordered_json(nullptr)
                                  : ordered_json(e.relative_delta);
    metrics.push_back(std::move(entry));
  }
  doc["metrics"] = std::move(metrics);
  return doc;
}

ordered_json validation_report_json(const ValidationReport& report) {
  ordered_json doc;
  doc["ok"] = report.ok();
  ordered_json issues = ordered_json::array();
  for (const ValidationIssue& issue : report.issues) {
    ordered_json entry;
    entry["kind"] = issue.kind;
    entry["message"] = issue.message;
    issues.push_back(std::move(entry));
  }
  doc["issues"] = std::move(issues);
  return doc;
}

std::vector<std::vector<std::string>> distribution_csv_rows(
    const bias::ScoreDistribution& dist) {
  std::vector<std::vector<std::string>> rows;
  const std::vector<double> centers = dist.bin_centers();
  rows.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    rows.push_back({g6(centers[i]), std::to_string(dist.counts_real[i]),
                    std::to_string(dist.counts_generated[i])});
  }
  return rows;
}

ordered_json distribution_json(const bias::ScoreDistribution& dist) {
  ordered_json doc;
  doc["pairs_real"] = dist.n_real;
  doc["pairs_generated"] = dist.n_generated;
  doc["mean_real"] = dist.mean_real;
  doc["stddev_real"] = dist.stddev_real;
  doc["mean_generated"] = dist.mean_generated;
  doc["stddev_generated"] = dist.stddev_generated;
  return doc;
}

namespace {

void append_delta_columns(std::vector<std::string>& cols) {
  for (const char* kind : {"ndcg", "recall"}) {
    for (unsigned k : {1u, 3u, 5u}) {
      cols.push_back(std::string("delta_") + kind + std::to_string(k));
    }
  }
}

void append_delta_values(const bias::BiasReport& report,
                         std::vector<std::string>& row) {
  for (ranking::MetricKind kind :
       {ranking::MetricKind::NDCG, ranking::MetricKind::Recall}) {
    for (unsigned k : {1u, 3u, 5u}) {
      const bias::BiasEntry& e = report.entry(kind, k);
      row.push_back(e.degenerate ? "nan" : g6(e.relative_delta));
    }
  }
}

}  // namespace

std::vector<std::string> sweep_alpha_columns() {
  std::vector<std::string> cols{"alpha"};
  append_delta_columns(cols);
  cols.push_back("ndcg5_real_only");
  cols.push_back("ndcg5_generated_only");
  return cols;
}

std::vector<std::vector<std::string>> sweep_alpha_csv_rows(
    const std::vector<train::SweepAlphaRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const train::SweepAlphaRow& r : rows) {
    std::vector<std::string> row{g6(r.alpha)};
    append_delta_values(r.report, row);
    row.push_back(g6(r.ndcg_real_only));
    row.push_back(g6(r.ndcg_generated_only));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> sweep_beta_columns() {
  std::vector<std::string> cols{"beta"};
  append_delta_columns(cols);
  cols.push_back("ndcg5_real_only");
  return cols;
}

std::vector<std::vector<std::string>> sweep_beta_csv_rows(
    const std::vector<train::SweepBetaRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const train::SweepBetaRow& r : rows) {
    std::vector<std::string> row{g6(r.beta)};
    append_delta_values(r.report, row);
    row.push_back(g6(r.ndcg_real_only));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> trace_columns() {
  return {"epoch",          "base_loss",       "penalty_loss",
          "sampled_triples", "delta_ndcg1",    "metric_real_ndcg1",
          "metric_generated_ndcg1"};
}

std::vector<std::vector<std::string>> trace_csv_rows(
    const train::TrainTrace& trace) {
  std::vector<std::vector<std::string>> out;
  out.reserve(trace.epochs.size());
  for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
    const train::EpochStats& e = trace.epochs[i];
    std::vector<std::string> row{std::to_string(i), g6(e.base_loss),
                                 g6(e.penalty_loss),
                                 std::to_string(e.sampled_triple_count)};
    if (!e.eval.entries.empty()) {
      const bias::BiasEntry& entry =
          e.eval.entry(ranking::MetricKind::NDCG, 1);
      row.push_back(entry.degenerate ? "nan" : g6(entry.relative_delta));
      row.push_back(g6(entry.metric_real));
      row.push_back(g6(entry.metric_generated));
    } else {
      row.insert(row.end(), {"nan", "nan", "nan"});
    }
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json transform_set_json(const analysis::TransformSet& tset) {
  ordered_json doc;
  doc["vector_count"] = tset.item_ids.size();
  doc["dispersion"] = tset.dispersion;
  doc["baseline_dispersion"] = tset.baseline_dispersion;
  doc["degenerate"] = tset.degenerate;
  ordered_json mean = ordered_json::array();
  for (Eigen::Index i = 0; i < tset.mean_vector.size(); ++i) {
    mean.push_back(tset.mean_vector[i]);
  }
  doc["mean_vector"] = std::move(mean);
  return doc;
}

std::vector<std::vector<std::string>> projection_csv_rows(
    const analysis::TransformSet& tset) {
  std::vector<std::vector<std::string>> rows;
  const struct {
    const char* family;
    const RowMatrix* data;
  } families[] = {{"r", &tset.originals},
                  {"rd", &tset.debiased},
                  {"p", &tset.vectors}};
  for (const auto& fam : families) {
    if (fam.data->rows() < 3) continue;
    const analysis::Projection proj = analysis::project_2d(*fam.data);
    for (Eigen::Index i = 0; i < proj.coords.rows(); ++i) {
      rows.push_back({fam.family,
                      tset.item_ids[static_cast<std::size_t>(i)],
                      g6(proj.coords(i, 0)), g6(proj.coords(i, 1))});
    }
  }
  return rows;
}

}  // namespace irb::report
