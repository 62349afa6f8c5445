// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_ANALYSIS_HPP
#define IRB_ANALYSIS_HPP

#include <string>
#include <vector>

#include "irb/bias.hpp"
#include "irb/encoder.hpp"

namespace irb::analysis {

// Per-item transformation vectors between a debiased and an original image
// encoder, with aggregation statistics. vectors row i is
// encode(debiased, raw_i) - encode(original, raw_i) for generated item i.
struct TransformSet {
  std::vector<std::string> item_ids;
  RowMatrix vectors;            // p_i rows
  RowMatrix originals;          // r_i rows (original encodings)
  RowMatrix debiased;           // r^d_i rows
  Eigen::VectorXd mean_vector;  // p-bar
  double dispersion = 0.0;           // mean pairwise cosine of the p_i
  double baseline_dispersion = 0.0;  // mean pairwise cosine of the r_i
  bool degenerate = false;           // all p_i vanish (models identical)
};

TransformSet extract_transforms(const encoder::DualEncoderModel& original,
                                const encoder::DualEncoderModel& debiased,
                                const std::vector<CorpusItem>& items,
                                const EmbeddingTable& img_table);

struct AggregationResult {
  bool aggregated = false;
  double margin = 0.0;  // dispersion - baseline_dispersion
};

// The transformations aggregate when their mean pairwise cosine exceeds the
// baseline dispersion of the representations themselves by the threshold.
AggregationResult aggregation_check(const TransformSet& tset,
                                    double margin_threshold = 0.2);

struct Projection {
  RowMatrix coords;  // n x 2
  int rank = 2;      // < 2 when the covariance was rank-deficient
};

// Deterministic projection onto the top-2 principal components
// (mean-centered; each component's largest-magnitude loading made positive).
// Rank-deficient inputs fall back to the available axes, zero-filled.
Projection project_2d(const RowMatrix& vectors);

enum class ReverseMode { mean, paired };

struct ReverseResult {
  bias::BiasReport before;
  bias::BiasReport after;
};

// Re-evaluates the corpus with every real item's representation shifted by
// p_sign * p (mean p-bar, or the pair's p_i in paired mode) and
// re-normalized; generated representations stay untouched. p_sign = -1
// applies the reverse transformation -p.
ReverseResult reverse_transform_eval(
    const encoder::DualEncoderModel& original, const TransformSet& tset,
    const Dataset& ds, const std::vector<ranking::MetricSpec>& specs,
    ReverseMode mode = ReverseMode::mean, double p_sign = -1.0);

// |cosine| between the mean transformation and the debiased image head's
// encoding of the negated watermark direction. Degenerate inputs (vanishing
// p-bar or collapsed encoding) report 0 with the flag set.
double oracle_alignment(const TransformSet& tset,
                        const Eigen::VectorXd& watermark,
                        const encoder::ProjectionHead& debiased_image_head,
                        bool* degenerate = nullptr);

}  // namespace irb::analysis

#endif  // IRB_ANALYSIS_HPP
