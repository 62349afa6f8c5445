// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_SYNTH_HPP
#define IRB_SYNTH_HPP

#include <string>
#include <vector>

#include "irb/core.hpp"

namespace irb::synth {

// Synthetic benchmark with a controllable additive bias direction. Each
// query gets one real image (query direction plus noise) and one generated
// counterpart (the same raw vector shifted by lambda along the watermark
// before normalization).
struct SynthConfig {
  std::size_t num_queries = 500;
  std::size_t dim = 64;
  // Noise spread of an image around its query. 0.2 keeps nearly every
  // query's own pair at the top of the ranking, which makes the lambda = 0
  // tie-break cancellation essentially exact; larger spreads drown the
  // pairs and leave the zero-watermark delta dominated by tie noise.
  double sigma_q = 0.2;
  double lambda = 0.15;  // watermark strength
  double gamma = 1.0;    // watermark energy along the mean query direction
  Seed seed{};
};

struct SynthDataset {
  Dataset dataset;
  Eigen::VectorXd watermark;  // ground truth, retained for oracle checks
  SynthConfig config;
};

// Deterministic per seed. lambda = 0 makes every generated row equal its
// real counterpart bit-for-bit; item ids then alternate which provenance
// wins the lexicographic tie-break so the construction stays symmetric.
SynthDataset synthesize(const SynthConfig& cfg);

// One (caption, image) training pair per caption.
struct TrainingPair {
  std::size_t query_index = 0;
  std::string caption_id;
  std::size_t caption_row = 0;
  std::string image_id;
  std::size_t image_row = 0;
  Provenance image_provenance = Provenance::Real;
};

// Pairs round(alpha*N/100) uniformly sampled captions with their generated
// counterpart and the rest with the real one. The total pair count stays N.
// Runs with alpha and 100-alpha under one seed select complementary caption
// subsets (away from rounding-midpoint alphas).
std::vector<TrainingPair> mix_training_set(const Dataset& ds, double alpha,
                                           Seed seed);

}  // namespace irb::synth

#endif  // IRB_SYNTH_HPP
