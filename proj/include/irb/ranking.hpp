// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_RANKING_HPP
#define IRB_RANKING_HPP

#include <string>
#include <vector>

#include "irb/core.hpp"

namespace irb::ranking {

enum class MetricKind { NDCG, Recall };

struct MetricSpec {
  MetricKind kind = MetricKind::NDCG;
  unsigned k = 1;
};

inline const char* metric_name(MetricKind kind) {
  return kind == MetricKind::NDCG ? "ndcg" : "recall";
}

// Table 4 style default: NDCG@{1,3,5} and R@{1,3,5}.
std::vector<MetricSpec> default_specs();

struct RankedEntry {
  std::string item_id;
  double score = 0.0;
};

// Full ordering of a corpus for one query: descending score, ties broken
// lexicographically by item_id.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;
};

// Dot product of two unit vectors; the cosine relevance score.
double score(const double* query_vec, const double* item_vec, std::size_t dim);
double score(const Eigen::VectorXd& query_vec, const Eigen::VectorXd& item_vec);

// Scores every item for every query and sorts. Output order follows the
// input query order.
std::vector<RankedList> rank_corpus(const std::vector<Query>& queries,
                                    const std::vector<CorpusItem>& items,
                                    const EmbeddingTable& qry_table,
                                    const EmbeddingTable& img_table);

// Binary single-relevant-item metric at cutoff k. With the relevant item at
// 1-based rank r: Recall@k = [r <= k]; NDCG@k = 1/log2(r+1) if r <= k else 0.
double metric_at(const RankedList& ranked, const std::string& relevant_item,
                 MetricSpec spec);

// Mean of metric_at over the queries that have a relevant item of the given
// provenance, in percent. Throws Errc::empty_selection if none qualifies.
double mean_metric(const std::vector<Query>& queries,
                   const std::vector<RankedList>& ranked_lists,
                   Provenance selector, MetricSpec spec);

}  // namespace irb::ranking

#endif  // IRB_RANKING_HPP
