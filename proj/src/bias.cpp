// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/bias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace irb::bias {

const BiasEntry& BiasReport::entry(ranking::MetricKind kind,
                                   unsigned k) const {
  for (const BiasEntry& e : entries) {
    if (e.spec.kind == kind && e.spec.k == k) return e;
  }
  throw_error(Errc::item_not_found,
              std::string("no bias entry for ") + ranking::metric_name(kind) +
                  "@" + std::to_string(k));
}

double relative_delta(double metric_real, double metric_generated) {
  if (metric_real < 0.0 || metric_generated < 0.0) {
    throw_error(Errc::invalid_argument, "metrics must be non-negative");
  }
  const double denom = metric_real + metric_generated;
  if (denom <= 0.0) {
    throw_error(Errc::degenerate, "both metrics are zero");
  }
  return 2.0 * (metric_real - metric_generated) / denom * 100.0;
}

BiasReport evaluate_bias(const std::vector<Query>& queries,
                         const std::vector<CorpusItem>& items,
                         const EmbeddingTable& qry_table,
                         const EmbeddingTable& img_table,
                         const std::vector<ranking::MetricSpec>& specs) {
  const std::vector<ranking::RankedList> ranked =
      ranking::rank_corpus(queries, items, qry_table, img_table);

  BiasReport report;
  report.query_count = queries.size();
  for (const CorpusItem& item : items) {
    if (item.provenance == Provenance::Real) ++report.real_count;
    else if (item.provenance == Provenance::Generated) ++report.generated_count;
  }

  for (const ranking::MetricSpec& spec : specs) {
    BiasEntry entry;
    entry.spec = spec;
    entry.metric_real =
        ranking::mean_metric(queries, ranked, Provenance::Real, spec);
    entry.metric_generated =
        ranking::mean_metric(queries, ranked, Provenance::Generated, spec);
    if (entry.metric_real + entry.metric_generated > 0.0) {
      entry.relative_delta =
          relative_delta(entry.metric_real, entry.metric_generated);
    } else {
      entry.relative_delta = std::numeric_limits<double>::quiet_NaN();
      entry.degenerate = true;
    }
    report.entries.push_back(entry);
  }
  return report;
}

std::vector<double> ScoreDistribution::bin_centers() const {
  std::vector<double> centers;
  centers.reserve(counts_real.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    centers.push_back((edges[i] + edges[i + 1]) / 2.0);
  }
  return centers;
}

ScoreDistribution score_distribution(const std::vector<Query>& queries,
                                     const std::vector<CorpusItem>& items,
                                     const EmbeddingTable& qry_table,
                                     const EmbeddingTable& img_table,
                                     unsigned bins) {
  if (bins == 0) {
    throw_error(Errc::invalid_argument, "bins must be positive");
  }
  std::unordered_map<std::string, const CorpusItem*> by_id;
  by_id.reserve(items.size());
  for (const CorpusItem& item : items) by_id.emplace(item.item_id, &item);

  const std::size_t dim = qry_table.dim();
  std::vector<double> scores_real, scores_generated;
  for (const Query& q : queries) {
    const double* qv = qry_table.row_ptr(q.row);
    const auto push = [&](const std::optional<std::string>& id,
                          std::vector<double>& dst) {
      if (!id) return;
      auto it = by_id.find(*id);
      if (it == by_id.end()) {
        throw_error(Errc::item_not_found, "relevant item '" + *id +
                                              "' missing from corpus");
      }
      dst.push_back(
          ranking::score(qv, img_table.row_ptr(it->second->row), dim));
    };
    push(q.relevant_real, scores_real);
    push(q.relevant_generated, scores_generated);
  }
  if (scores_real.empty() && scores_generated.empty()) {
    throw_error(Errc::empty_selection, "no scored pairs");
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double s : scores_real) { lo = std::min(lo, s); hi = std::max(hi, s); }
  for (double s : scores_generated) { lo = std::min(lo, s); hi = std::max(hi, s); }
  if (hi <= lo) hi = lo + 1e-12;  // all scores identical: one occupied bin

  ScoreDistribution dist;
  dist.edges.resize(bins + 1);
  for (unsigned i = 0; i <= bins; ++i) {
    dist.edges[i] = lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(bins);
  }
  dist.counts_real.assign(bins, 0);
  dist.counts_generated.assign(bins, 0);

  const auto bin_of = [&](double s) {
    auto b = static_cast<long>((s - lo) / (hi - lo) *
                               static_cast<double>(bins));
    if (b < 0) b = 0;
    if (b >= static_cast<long>(bins)) b = static_cast<long>(bins) - 1;
    return static_cast<std::size_t>(b);
  };
  const auto stats = [](const std::vector<double>& v, double& mean,
                        double& stddev) {
    if (v.empty()) { mean = 0.0; stddev = 0.0; return; }
    double sum = 0.0;
    for (double s : v) sum += s;
    mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double s : v) ss += (s - mean) * (s - mean);
    stddev = std::sqrt(ss / static_cast<double>(v.size()));
  };

  for (double s : scores_real) ++dist.counts_real[bin_of(s)];
  for (double s : scores_generated) ++dist.counts_generated[bin_of(s)];
  stats(scores_real, dist.mean_real, dist.stddev_real);
  stats(scores_generated, dist.mean_generated, dist.stddev_generated);
  dist.n_real = scores_real.size();
  dist.n_generated = scores_generated.size();
  return dist;
}

ParityResult parity_check(const std::vector<Query>& queries,
                          const std::vector<CorpusItem>& real_items,
                          const std::vector<CorpusItem>& generated_items,
                          const EmbeddingTable& qry_table,
                          const EmbeddingTable& img_table,
                          ranking::MetricSpec spec) {
  const auto ranked_real =
      ranking::rank_corpus(queries, real_items, qry_table, img_table);
  const auto ranked_generated =
      ranking::rank_corpus(queries, generated_items, qry_table, img_table);

  ParityResult result;
  result.metric_real_only =
      ranking::mean_metric(queries, ranked_real, Provenance::Real, spec);
  result.metric_generated_only = ranking::mean_metric(
      queries, ranked_generated, Provenance::Generated, spec);
  result.abs_gap =
      std::fabs(result.metric_real_only - result.metric_generated_only);
  return result;
}

std::size_t select_candidate(const CandidateSet& cset,
                             const EmbeddingTable& table) {
  if (cset.candidate_rows.empty()) {
    throw_error(Errc::empty_candidates, "candidate set is empty");
  }
  const std::size_t dim = table.dim();
  const double* ref = table.row_ptr(cset.real_row);
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cset.candidate_rows.size(); ++i) {
    const double sim =
        ranking::score(ref, table.row_ptr(cset.candidate_rows[i]), dim);
    if (sim > best_sim) {
      best_sim = sim;
      best = i;
    }
  }
  return best;
}

}  // namespace irb::bias
