// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unordered_map>

namespace irb::analysis {

namespace {

constexpr double kTinyNorm = 1e-12;

// Mean pairwise cosine with fixed-order summation; pairs with a vanishing
// vector are skipped. Returns false when no valid pair exists.
bool mean_pairwise_cosine(const RowMatrix& rows, double* out) {
  const Eigen::Index n = rows.rows();
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) norms[i] = rows.row(i).norm();

  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms[i] < kTinyNorm) continue;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (norms[j] < kTinyNorm) continue;
      sum += rows.row(i).dot(rows.row(j)) / (norms[i] * norms[j]);
      ++count;
    }
  }
  if (count == 0) {
    *out = 0.0;
    return false;
  }
  *out = sum / static_cast<double>(count);
  return true;
}

}  // namespace

TransformSet extract_transforms(const encoder::DualEncoderModel& original,
                                const encoder::DualEncoderModel& debiased,
                                const std::vector<CorpusItem>& items,
                                const EmbeddingTable& img_table) {
  if (original.image_head.d_out() != debiased.image_head.d_out()) {
    throw_error(Errc::dim_mismatch,
                "models disagree on scoring-space dimension");
  }
  std::vector<const CorpusItem*> generated;
  for (const CorpusItem& item : items) {
    if (item.provenance == Provenance::Generated) generated.push_back(&item);
  }

  const EmbeddingTable enc_orig =
      encoder::encode_table(original.image_head, img_table);
  const EmbeddingTable enc_deb =
      encoder::encode_table(debiased.image_head, img_table);

  TransformSet tset;
  const auto n = static_cast<Eigen::Index>(generated.size());
  const auto d = static_cast<Eigen::Index>(enc_orig.dim());
  tset.vectors.resize(n, d);
  tset.originals.resize(n, d);
  tset.debiased.resize(n, d);
  tset.item_ids.reserve(generated.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const CorpusItem& item = *generated[static_cast<std::size_t>(i)];
    tset.item_ids.push_back(item.item_id);
    const auto row = static_cast<Eigen::Index>(item.row);
    tset.originals.row(i) = enc_orig.data.row(row);
    tset.debiased.row(i) = enc_deb.data.row(row);
    tset.vectors.row(i) = enc_deb.data.row(row) - enc_orig.data.row(row);
  }

  if (n > 0) {
    tset.mean_vector = tset.vectors.colwise().mean().transpose();
  } else {
    tset.mean_vector = Eigen::VectorXd::Zero(d);
  }
  const bool have_dispersion =
      mean_pairwise_cosine(tset.vectors, &tset.dispersion);
  mean_pairwise_cosine(tset.originals, &tset.baseline_dispersion);
  tset.degenerate = !have_dispersion;
  return tset;
}

AggregationResult aggregation_check(const TransformSet& tset,
                                    double margin_threshold) {
  if (tset.vectors.rows() < 2) {
    throw_error(Errc::too_few_vectors,
                "aggregation check needs at least 2 vectors");
  }
  AggregationResult result;
  result.margin = tset.dispersion - tset.baseline_dispersion;
  result.aggregated = !tset.degenerate && result.margin > margin_threshold;
  return result;
}

Projection project_2d(const RowMatrix& vectors) {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index d = vectors.cols();
  if (n < 3) {
    throw_error(Errc::too_few_vectors, "projection needs at least 3 vectors");
  }

  const Eigen::RowVectorXd mean = vectors.colwise().mean();
  const RowMatrix centered = vectors.rowwise() - mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw_error(Errc::internal, "eigendecomposition failed");
  }
  // Eigenvalues ascend; take the top two.
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();
  const double scale = std::max(evals.cwiseAbs().maxCoeff(), 0.0);
  const double tol = std::max(scale * 1e-12, 1e-300);

  Projection proj;
  proj.coords = RowMatrix::Zero(n, 2);
  proj.rank = 0;
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index idx = d - 1 - axis;
    if (idx < 0 || evals[idx] <= tol) break;  // degenerate covariance
    Eigen::VectorXd component = evecs.col(idx);
    // Sign convention: largest-magnitude loading positive.
    Eigen::Index max_i = 0;
    component.cwiseAbs().maxCoeff(&max_i);
    if (component[max_i] < 0.0) component = -component;
    proj.coords.col(axis) = centered * component;
    ++proj.rank;
  }
  return proj;
}

ReverseResult reverse_transform_eval(
    const encoder::DualEncoderModel& original, const TransformSet& tset,
    const Dataset& ds, const std::vector<ranking::MetricSpec>& specs,
    ReverseMode mode, double p_sign) {
  const EmbeddingTable enc_q =
      encoder::encode_table(original.query_head, ds.qry_table);
  const EmbeddingTable enc_i =
      encoder::encode_table(original.image_head, ds.img_table);

  ReverseResult result;
  result.before = bias::evaluate_bias(ds.queries, ds.items, enc_q, enc_i,
                                      specs);

  std::unordered_map<std::string, Eigen::Index> p_by_item;
  if (mode == ReverseMode::paired) {
    for (std::size_t i = 0; i < tset.item_ids.size(); ++i) {
      p_by_item.emplace(tset.item_ids[i], static_cast<Eigen::Index>(i));
    }
  }

  EmbeddingTable shifted = enc_i;
  for (const CorpusItem& item : ds.items) {
    if (item.provenance != Provenance::Real) continue;
    const auto row = static_cast<Eigen::Index>(item.row);
    Eigen::RowVectorXd p;
    if (mode == ReverseMode::mean) {
      p = tset.mean_vector.transpose();
    } else {
      if (!item.pair_id) {
        throw_error(Errc::missing_counterpart,
                    "real item '" + item.item_id + "' has no pair");
      }
      auto it = p_by_item.find(*item.pair_id);
      if (it == p_by_item.end()) {
        throw_error(Errc::missing_counterpart,
                    "no transformation for pair '" + *item.pair_id + "'");
      }
      p = tset.vectors.row(it->second);
    }
    Eigen::RowVectorXd rep = shifted.data.row(row) + p_sign * p;
    const double norm = rep.norm();
    if (norm < kTinyNorm) {
      throw_error(Errc::zero_vector,
                  "shifted representation collapsed for '" + item.item_id +
                      "'");
    }
    shifted.data.row(row) = rep / norm;
  }

  result.after =
      bias::evaluate_bias(ds.queries, ds.items, enc_q, shifted, specs);
  return result;
}

double oracle_alignment(const TransformSet& tset,
                        const Eigen::VectorXd& watermark,
                        const encoder::ProjectionHead& debiased_image_head,
                        bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (static_cast<std::size_t>(watermark.size()) !=
      debiased_image_head.d_in()) {
    throw_error(Errc::dim_mismatch, "watermark dim does not match head");
  }
  const double mean_norm = tset.mean_vector.norm();
  if (mean_norm < 1e-9) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  Eigen::VectorXd target;
  try {
    target = encoder::encode(debiased_image_head, (-watermark).eval());
  } catch (const Error&) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::fabs(tset.mean_vector.dot(target) / mean_norm);
}

}  // namespace irb::analysis
