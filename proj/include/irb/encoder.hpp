// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_ENCODER_HPP
#define IRB_ENCODER_HPP

#include <filesystem>
#include <utility>

#include "irb/core.hpp"

namespace irb::encoder {

// Projection head mapping raw embeddings into the shared scoring space.
// Default is a single linear layer followed by l2 normalization; an optional
// tanh hidden layer sits behind the init switch (w2/b2 empty means linear).
struct ProjectionHead {
  Eigen::MatrixXd w1;  // hidden x in, or out x in when linear
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // out x hidden; 0x0 when linear
  Eigen::VectorXd b2;

  bool has_hidden() const { return w2.size() > 0; }
  std::size_t d_in() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t d_out() const {
    return static_cast<std::size_t>(has_hidden() ? w2.rows() : w1.rows());
  }
};

struct DualEncoderModel {
  ProjectionHead query_head;
  ProjectionHead image_head;
  double temperature = 0.05;
};

// normalize(w2 * tanh(w1 * raw + b1) + b2), or normalize(w1 * raw + b1) for
// the linear head. Throws Errc::zero_vector when the pre-normalization
// output collapses.
Eigen::VectorXd encode(const ProjectionHead& head, const Eigen::VectorXd& raw);

// Cosine score of the encoded query and image; in [-1, 1].
double model_score(const DualEncoderModel& model,
                   const Eigen::VectorXd& query_raw,
                   const Eigen::VectorXd& image_raw);

// Every row of the table through the head; result is unit-normalized.
EmbeddingTable encode_table(const ProjectionHead& head,
                            const EmbeddingTable& table);

struct InitOptions {
  std::size_t hidden_dim = 0;  // 0 => linear head
  bool identity = false;       // exact identity heads (requires d_out == d_in)
};

// Weights ~ zero-mean normal with scale 1/sqrt(d_in); biases zero.
// Deterministic per seed.
DualEncoderModel init_model(std::size_t d_in_q, std::size_t d_in_i,
                            std::size_t d_out, Seed seed,
                            const InitOptions& opts = {});

struct HeadGrads {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

struct GradientSet {
  HeadGrads query;
  HeadGrads image;
};

GradientSet zeros_like(const DualEncoderModel& model);

// (caption, image) rows aligned by index; the in-batch contrastive batch.
struct PairBatch {
  RowMatrix captions;  // m x d_in_q
  RowMatrix images;    // m x d_in_i
  std::size_t size() const { return static_cast<std::size_t>(captions.rows()); }
};

// Caption-real-generated triples for the debiasing penalty, aligned by row.
struct TripleBatch {
  RowMatrix captions;
  RowMatrix reals;
  RowMatrix gens;
  std::size_t size() const { return static_cast<std::size_t>(captions.rows()); }
};

enum class PenaltyKind { none, hinge, raw };

struct LossSpec {
  bool include_base = true;
  PenaltyKind penalty = PenaltyKind::none;
};

struct LossValue {
  double total = 0.0;
  double base = 0.0;
  double penalty = 0.0;
};

// Loss and exact analytic gradients, including through the normalization in
// encode. Base part: symmetric in-batch softmax cross-entropy over
// scores / temperature, both directions averaged, mean-reduced over the
// batch. Penalty part: sum over triples of ds or max(0, ds), where
// ds = score(caption, generated) - score(caption, real).
// Pass grads = nullptr for a loss-only evaluation.
LossValue gradients(const DualEncoderModel& model, const PairBatch& pairs,
                    const TripleBatch& triples, const LossSpec& spec,
                    GradientSet* grads);

// Checkpoint format: magic "DEM1", u32 version, u32 arch, dims, f64
// temperature, then raw row-major f64 parameters for both heads.
// Round-trips bit-exactly.
void save_model(const DualEncoderModel& model,
                const std::filesystem::path& path);
DualEncoderModel load_model(const std::filesystem::path& path);

}  // namespace irb::encoder

#endif  // IRB_ENCODER_HPP
