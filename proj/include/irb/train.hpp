// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_TRAIN_HPP
#define IRB_TRAIN_HPP

#include <string>
#include <vector>

#include "irb/bias.hpp"
#include "irb/encoder.hpp"
#include "irb/synth.hpp"

namespace irb::train {

// Caption-real-generated triple by table rows, with ids for traceability.
struct Triple {
  std::string caption_id;
  std::string real_id;
  std::string generated_id;
  std::size_t caption_row = 0;
  std::size_t real_row = 0;
  std::size_t generated_row = 0;
};

enum class PenaltyMode { indicator_hinge, indicator_raw };

struct TrainConfig {
  unsigned epochs = 30;
  unsigned batch_size = 64;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double beta = 0.0;           // Bernoulli sampling probability for set B
  double temperature = 0.05;
  Seed seed{};
  PenaltyMode penalty_mode = PenaltyMode::indicator_hinge;
  std::size_t d_out = 0;       // 0 => same as input dim
  std::size_t hidden_dim = 0;  // 0 => linear heads
  double holdout_fraction = 0.2;
};

struct EpochStats {
  double base_loss = 0.0;
  double penalty_loss = 0.0;
  std::size_t sampled_triple_count = 0;
  bias::BiasReport eval;  // held-out bias report
};

struct TrainTrace {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  encoder::DualEncoderModel model;
  TrainTrace trace;
};

// One triple per query that has both counterparts.
std::vector<Triple> make_triples(const Dataset& ds);

// Deterministic holdout split: returns the held-out query indices.
std::vector<std::size_t> split_holdout(std::size_t num_queries,
                                       double fraction, Seed seed);

// score(caption, generated) - score(caption, real) under current parameters.
double delta_s(const encoder::DualEncoderModel& model, const Dataset& ds,
               const Triple& triple);

// Every triple with delta_s > 0 is included independently with probability
// beta; non-positive triples are never included. Deterministic per seed.
std::vector<Triple> sample_B(const encoder::DualEncoderModel& model,
                             const Dataset& ds,
                             const std::vector<Triple>& triples, double beta,
                             Seed seed);

// Symmetric in-batch softmax contrastive loss over the pair batch.
encoder::LossValue base_loss(const encoder::DualEncoderModel& model,
                             const Dataset& ds,
                             const std::vector<synth::TrainingPair>& batch,
                             encoder::GradientSet* grads = nullptr);

// base_loss plus the penalty summed over the sampled triples.
encoder::LossValue total_loss(const encoder::DualEncoderModel& model,
                              const Dataset& ds,
                              const std::vector<synth::TrainingPair>& batch,
                              const std::vector<Triple>& sampled_triples,
                              PenaltyMode mode,
                              encoder::GradientSet* grads = nullptr);

// Mini-batch gradient descent with momentum on the total objective. B is
// resampled at the start of every epoch under the current parameters; the
// per-epoch held-out BiasReport evaluates the sub-corpus of held-out
// queries. Deterministic per (inputs, seed).
TrainResult train(const Dataset& ds,
                  const std::vector<synth::TrainingPair>& pairs,
                  const std::vector<Triple>& triples,
                  const std::vector<std::size_t>& holdout_queries,
                  const TrainConfig& cfg);

// Holdout split, contamination-mixed training pairs (holdout captions
// excluded) and the penalty triples for one run.
struct PreparedRun {
  std::vector<std::size_t> holdout;
  std::vector<synth::TrainingPair> pairs;
  std::vector<Triple> triples;
};
PreparedRun prepare_run(const Dataset& ds, double alpha,
                        const TrainConfig& cfg);

struct SweepAlphaRow {
  double alpha = 0.0;
  bias::BiasReport report;
  double ndcg_real_only = 0.0;       // NDCG@5 on the real-only corpus
  double ndcg_generated_only = 0.0;  // NDCG@5 on the generated-only corpus
};

// Contamination sweep: per alpha, mix the training pairs, train with
// beta = 0 and evaluate on held-out data.
std::vector<SweepAlphaRow> sweep_alpha(const Dataset& ds,
                                       const std::vector<double>& alphas,
                                       const TrainConfig& cfg,
                                       unsigned jobs = 1);

struct SweepBetaRow {
  double beta = 0.0;
  bias::BiasReport report;
  double ndcg_real_only = 0.0;
  bias::ScoreDistribution distribution;
};

// Debias sweep: one model per beta on the same (all-real) training pairs
// and seed.
std::vector<SweepBetaRow> sweep_beta(const Dataset& ds,
                                     const std::vector<double>& betas,
                                     const TrainConfig& cfg,
                                     unsigned jobs = 1);

// Helpers shared by sweeps and the acceptance harness.
struct HoldoutEval {
  bias::BiasReport report;
  double ndcg_real_only = 0.0;
  double ndcg_generated_only = 0.0;
  bias::ScoreDistribution distribution;
};
HoldoutEval evaluate_on_holdout(const encoder::DualEncoderModel& model,
                                const Dataset& ds,
                                const std::vector<std::size_t>& holdout,
                                unsigned distribution_bins = 50);

double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y);

}  // namespace irb::train

#endif  // IRB_TRAIN_HPP
