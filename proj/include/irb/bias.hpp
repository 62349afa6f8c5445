// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_BIAS_HPP
#define IRB_BIAS_HPP

#include <string>
#include <vector>

#include "irb/ranking.hpp"

namespace irb::bias {

// Per-cutoff metrics split by provenance plus the signed relative gap.
// relative_delta is NaN only in the degenerate case where both metrics are 0.
struct BiasEntry {
  ranking::MetricSpec spec;
  double metric_real = 0.0;       // percent
  double metric_generated = 0.0;  // percent
  double relative_delta = 0.0;    // percent
  bool degenerate = false;
};

struct BiasReport {
  std::vector<BiasEntry> entries;
  std::size_t query_count = 0;
  std::size_t real_count = 0;
  std::size_t generated_count = 0;

  const BiasEntry& entry(ranking::MetricKind kind, unsigned k) const;
};

// 2 * (metric_real - metric_generated) / (metric_real + metric_generated)
// * 100. Positive means real items rank higher, negative means generated
// items rank higher. Computed from unrounded metric values.
double relative_delta(double metric_real, double metric_generated);

// Ranks the mixed corpus once, then fills one BiasEntry per spec.
BiasReport evaluate_bias(const std::vector<Query>& queries,
                         const std::vector<CorpusItem>& items,
                         const EmbeddingTable& qry_table,
                         const EmbeddingTable& img_table,
                         const std::vector<ranking::MetricSpec>& specs);

// Histogram of (query, relevant item) scores split by provenance, with
// shared bin edges over the pooled score range.
struct ScoreDistribution {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts_real;
  std::vector<std::size_t> counts_generated;
  double mean_real = 0.0, stddev_real = 0.0;
  double mean_generated = 0.0, stddev_generated = 0.0;
  std::size_t n_real = 0, n_generated = 0;

  std::vector<double> bin_centers() const;
};

ScoreDistribution score_distribution(const std::vector<Query>& queries,
                                     const std::vector<CorpusItem>& items,
                                     const EmbeddingTable& qry_table,
                                     const EmbeddingTable& img_table,
                                     unsigned bins);

// Retrieval on two disjoint single-provenance corpora covering the same
// queries; the absolute metric gap is the R-2 parity statistic.
struct ParityResult {
  double metric_real_only = 0.0;
  double metric_generated_only = 0.0;
  double abs_gap = 0.0;
};

ParityResult parity_check(const std::vector<Query>& queries,
                          const std::vector<CorpusItem>& real_items,
                          const std::vector<CorpusItem>& generated_items,
                          const EmbeddingTable& qry_table,
                          const EmbeddingTable& img_table,
                          ranking::MetricSpec spec);

// Candidate pool for over-sampling selection: one reference row and the
// generated candidates, all in the same table.
struct CandidateSet {
  std::size_t real_row = 0;
  std::vector<std::size_t> candidate_rows;
};

// Index (position in candidate_rows) of the candidate with maximum cosine
// similarity to the reference row; ties go to the smallest position.
std::size_t select_candidate(const CandidateSet& cset,
                             const EmbeddingTable& table);

}  // namespace irb::bias

#endif  // IRB_BIAS_HPP
