// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace irb::ranking {

std::vector<MetricSpec> default_specs() {
  std::vector<MetricSpec> specs;
  for (unsigned k : {1u, 3u, 5u}) specs.push_back({MetricKind::NDCG, k});
  for (unsigned k : {1u, 3u, 5u}) specs.push_back({MetricKind::Recall, k});
  return specs;
}

double score(const double* query_vec, const double* item_vec,
             std::size_t dim) {
  // Sequential summation keeps rankings bit-reproducible against the
  // reference evaluation path.
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += query_vec[i] * item_vec[i];
  return acc;
}

double score(const Eigen::VectorXd& query_vec,
             const Eigen::VectorXd& item_vec) {
  if (query_vec.size() != item_vec.size()) {
    throw_error(Errc::dim_mismatch,
                "score: query dim " + std::to_string(query_vec.size()) +
                    " != item dim " + std::to_string(item_vec.size()));
  }
  return score(query_vec.data(), item_vec.data(),
               static_cast<std::size_t>(query_vec.size()));
}

std::vector<RankedList> rank_corpus(const std::vector<Query>& queries,
                                    const std::vector<CorpusItem>& items,
                                    const EmbeddingTable& qry_table,
                                    const EmbeddingTable& img_table) {
  if (qry_table.dim() != img_table.dim()) {
    throw_error(Errc::dim_mismatch,
                "rank_corpus: query table dim " +
                    std::to_string(qry_table.dim()) + " != image table dim " +
                    std::to_string(img_table.dim()));
  }
  const std::size_t dim = qry_table.dim();

  std::vector<RankedList> out;
  out.reserve(queries.size());
  for (const Query& q : queries) {
    RankedList ranked;
    ranked.query_id = q.query_id;
    ranked.entries.reserve(items.size());
    const double* qv = qry_table.row_ptr(q.row);
    for (const CorpusItem& item : items) {
      ranked.entries.push_back(
          {item.item_id, score(qv, img_table.row_ptr(item.row), dim)});
    }
    std::sort(ranked.entries.begin(), ranked.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.item_id < b.item_id;
              });
    out.push_back(std::move(ranked));
  }
  return out;
}

double metric_at(const RankedList& ranked, const std::string& relevant_item,
                 MetricSpec spec) {
  std::size_t rank = 0;  // 1-based once found
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    if (ranked.entries[i].item_id == relevant_item) {
      rank = i + 1;
      break;
    }
  }
  if (rank == 0) {
    throw_error(Errc::item_not_found, "item '" + relevant_item +
                                          "' not ranked for query '" +
                                          ranked.query_id + "'");
  }
  if (rank > spec.k) return 0.0;
  if (spec.kind == MetricKind::Recall) return 1.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double mean_metric(const std::vector<Query>& queries,
                   const std::vector<RankedList>& ranked_lists,
                   Provenance selector, MetricSpec spec) {
  if (queries.size() != ranked_lists.size()) {
    throw_error(Errc::invalid_argument,
                "mean_metric: queries and ranked lists differ in length");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& relevant = selector == Provenance::Real
                               ? queries[i].relevant_real
                               : queries[i].relevant_generated;
    if (!relevant) continue;
    sum += metric_at(ranked_lists[i], *relevant, spec);
    ++n;
  }
  if (n == 0) {
    throw_error(Errc::empty_selection,
                std::string("no query has a relevant ") +
                    provenance_name(selector) + " item");
  }
  return sum / static_cast<double>(n) * 100.0;
}

}  // namespace irb::ranking
