// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "irb/train.hpp"

using namespace irb;
using train::PenaltyMode;
using train::TrainConfig;
using train::Triple;

namespace {

synth::SynthDataset small_dataset(std::uint64_t seed, std::size_t n = 60,
                                  double lambda = 0.15) {
  synth::SynthConfig cfg;
  cfg.num_queries = n;
  cfg.dim = 16;
  cfg.lambda = lambda;
  cfg.gamma = 1.0;
  cfg.seed = Seed{seed};
  return synth::synthesize(cfg);
}

TrainConfig quick_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.seed = Seed{seed};
  return cfg;
}

}  // namespace

TEST_CASE("base_loss closed forms") {
  encoder::DualEncoderModel model =
      encoder::init_model(2, 2, 2, Seed{0}, {0, true});
  model.temperature = 1.0;

  Dataset ds;
  ds.qry_table = EmbeddingTable(2, 2);
  ds.qry_table.data << 1, 0, -1, 0;
  ds.img_table = EmbeddingTable(2, 2);
  ds.img_table.data << 1, 0, -1, 0;

  std::vector<synth::TrainingPair> batch(2);
  batch[0].caption_row = 0;
  batch[0].image_row = 0;
  batch[1].caption_row = 1;
  batch[1].image_row = 1;

  // score matrix [[1,-1],[-1,1]] at tau = 1
  const encoder::LossValue loss = train::base_loss(model, ds, batch);
  CHECK(loss.base ==
        doctest::Approx(std::log(1.0 + std::exp(-2.0))).epsilon(1e-12));

  // all scores equal -> ln(batch_size)
  Dataset flat;
  flat.qry_table = EmbeddingTable(3, 2);
  flat.qry_table.data << 1, 0, 1, 0, 1, 0;
  flat.img_table = flat.qry_table;
  std::vector<synth::TrainingPair> flat_batch(3);
  for (std::size_t i = 0; i < 3; ++i) {
    flat_batch[i].caption_row = i;
    flat_batch[i].image_row = i;
  }
  const encoder::LossValue flat_loss = train::base_loss(model, flat, flat_batch);
  CHECK(flat_loss.base == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("base_loss is permutation invariant") {
  const auto data = small_dataset(1, 20);
  encoder::DualEncoderModel model = encoder::init_model(16, 16, 8, Seed{2});
  auto pairs = synth::mix_training_set(data.dataset, 0.0, Seed{3});
  std::vector<synth::TrainingPair> batch(pairs.begin(), pairs.begin() + 8);
  const double forward = train::base_loss(model, data.dataset, batch).base;
  std::reverse(batch.begin(), batch.end());
  const double backward = train::base_loss(model, data.dataset, batch).base;
  CHECK(forward == doctest::Approx(backward).epsilon(1e-12));
}

TEST_CASE("delta_s is antisymmetric and zero on identical rows") {
  const auto data = small_dataset(4, 20);
  encoder::DualEncoderModel model = encoder::init_model(16, 16, 8, Seed{5});
  const std::vector<Triple> triples = train::make_triples(data.dataset);
  REQUIRE(!triples.empty());

  Triple t = triples[0];
  Triple same = t;
  same.generated_row = same.real_row;
  CHECK(train::delta_s(model, data.dataset, same) == 0.0);

  Triple swapped = t;
  std::swap(swapped.real_row, swapped.generated_row);
  CHECK(train::delta_s(model, data.dataset, swapped) ==
        doctest::Approx(-train::delta_s(model, data.dataset, t))
            .epsilon(1e-12));

  // difference of two explicitly computed scores
  const double expected =
      encoder::model_score(model, data.dataset.qry_table.row_vec(t.caption_row),
                           data.dataset.img_table.row_vec(t.generated_row)) -
      encoder::model_score(model, data.dataset.qry_table.row_vec(t.caption_row),
                           data.dataset.img_table.row_vec(t.real_row));
  CHECK(train::delta_s(model, data.dataset, t) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sample_B honors the indicator and the probability") {
  const auto data = small_dataset(6, 200, 0.2);
  encoder::DualEncoderModel model =
      encoder::init_model(16, 16, 16, Seed{0}, {0, true});
  const std::vector<Triple> triples = train::make_triples(data.dataset);

  const auto all = train::sample_B(model, data.dataset, triples, 1.0, Seed{7});
  for (const Triple& t : all) {
    CHECK(train::delta_s(model, data.dataset, t) > 0.0);
  }
  std::size_t eligible = 0;
  for (const Triple& t : triples) {
    eligible += (train::delta_s(model, data.dataset, t) > 0.0);
  }
  CHECK(all.size() == eligible);

  CHECK(train::sample_B(model, data.dataset, triples, 0.0, Seed{7}).empty());

  const auto half_a = train::sample_B(model, data.dataset, triples, 0.5, Seed{8});
  const auto half_b = train::sample_B(model, data.dataset, triples, 0.5, Seed{8});
  CHECK(half_a.size() == half_b.size());
  for (std::size_t i = 0; i < half_a.size(); ++i) {
    CHECK(half_a[i].caption_id == half_b[i].caption_id);
  }
}

TEST_CASE("sample_B inclusion fraction concentrates around beta") {
  // 10000 eligible triples built directly: generated closer to the caption
  // than real, under identity heads.
  const std::size_t n = 10000, dim = 8;
  Dataset ds;
  ds.qry_table = EmbeddingTable(n, dim);
  ds.img_table = EmbeddingTable(2 * n, dim);
  Rng rng(Seed{70});
  std::vector<Triple> triples(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd q(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      q[static_cast<Eigen::Index>(j)] = rng.normal();
    }
    q.normalize();
    ds.qry_table.data.row(static_cast<Eigen::Index>(i)) = q.transpose();
    Eigen::VectorXd far = -q;
    ds.img_table.data.row(static_cast<Eigen::Index>(2 * i)) = far.transpose();
    ds.img_table.data.row(static_cast<Eigen::Index>(2 * i + 1)) = q.transpose();
    triples[i].caption_row = i;
    triples[i].real_row = 2 * i;       // antipodal: low score
    triples[i].generated_row = 2 * i + 1;  // identical: high score
  }
  encoder::DualEncoderModel model =
      encoder::init_model(dim, dim, dim, Seed{0}, {0, true});
  const auto sampled = train::sample_B(model, ds, triples, 0.5, Seed{71});
  const double fraction =
      static_cast<double>(sampled.size()) / static_cast<double>(n);
  CHECK(fraction > 0.47);
  CHECK(fraction < 0.53);
}

TEST_CASE("total_loss composes base and penalty") {
  const auto data = small_dataset(8, 30);
  encoder::DualEncoderModel model = encoder::init_model(16, 16, 8, Seed{9});
  const auto pairs = synth::mix_training_set(data.dataset, 0.0, Seed{10});
  std::vector<synth::TrainingPair> batch(pairs.begin(), pairs.begin() + 8);
  const std::vector<Triple> triples = train::make_triples(data.dataset);

  const encoder::LossValue base = train::base_loss(model, data.dataset, batch);
  const encoder::LossValue no_triples = train::total_loss(
      model, data.dataset, batch, {}, PenaltyMode::indicator_hinge);
  CHECK(no_triples.total == base.base);

  // raw mode adds the exact delta_s of each sampled triple
  std::vector<Triple> two(triples.begin(), triples.begin() + 2);
  const double expected_penalty = train::delta_s(model, data.dataset, two[0]) +
                                  train::delta_s(model, data.dataset, two[1]);
  const encoder::LossValue raw = train::total_loss(
      model, data.dataset, batch, two, PenaltyMode::indicator_raw);
  CHECK(raw.penalty == doctest::Approx(expected_penalty).epsilon(1e-12));
  CHECK(raw.total == doctest::Approx(base.base + expected_penalty)
                         .epsilon(1e-12));

  // hinge mode only keeps positive contributions
  const encoder::LossValue hinge = train::total_loss(
      model, data.dataset, batch, two, PenaltyMode::indicator_hinge);
  double expected_hinge = 0.0;
  for (const Triple& t : two) {
    expected_hinge += std::max(0.0, train::delta_s(model, data.dataset, t));
  }
  CHECK(hinge.penalty == doctest::Approx(expected_hinge).epsilon(1e-12));
}

TEST_CASE("zero learning rate keeps the initial model") {
  const auto data = small_dataset(11, 40);
  TrainConfig cfg = quick_config(12);
  cfg.learning_rate = 0.0;
  const train::PreparedRun run = train::prepare_run(data.dataset, 0.0, cfg);
  const train::TrainResult result =
      train::train(data.dataset, run.pairs, run.triples, run.holdout, cfg);

  const encoder::DualEncoderModel initial = encoder::init_model(
      16, 16, 16, derive_seed(cfg.seed, 103), {0, false});
  CHECK(result.model.query_head.w1 == initial.query_head.w1);
  CHECK(result.model.image_head.w1 == initial.image_head.w1);
}

TEST_CASE("training is bit-deterministic per seed") {
  const auto data = small_dataset(13, 50);
  TrainConfig cfg = quick_config(14);
  cfg.beta = 0.7;
  const train::PreparedRun run = train::prepare_run(data.dataset, 20.0, cfg);
  const train::TrainResult a =
      train::train(data.dataset, run.pairs, run.triples, run.holdout, cfg);
  const train::TrainResult b =
      train::train(data.dataset, run.pairs, run.triples, run.holdout, cfg);
  CHECK(a.model.query_head.w1 == b.model.query_head.w1);
  CHECK(a.model.image_head.w1 == b.model.image_head.w1);
  REQUIRE(a.trace.epochs.size() == b.trace.epochs.size());
  for (std::size_t e = 0; e < a.trace.epochs.size(); ++e) {
    CHECK(a.trace.epochs[e].base_loss == b.trace.epochs[e].base_loss);
    CHECK(a.trace.epochs[e].penalty_loss == b.trace.epochs[e].penalty_loss);
    CHECK(a.trace.epochs[e].sampled_triple_count ==
          b.trace.epochs[e].sampled_triple_count);
  }
}

TEST_CASE("beta zero trajectory equals base-only training") {
  const auto data = small_dataset(15, 50);
  TrainConfig cfg = quick_config(16);
  cfg.beta = 0.0;
  const train::PreparedRun run = train::prepare_run(data.dataset, 0.0, cfg);
  const train::TrainResult with_machinery =
      train::train(data.dataset, run.pairs, run.triples, run.holdout, cfg);
  // removing the triples entirely must not change anything at beta = 0
  const train::TrainResult base_only =
      train::train(data.dataset, run.pairs, {}, run.holdout, cfg);
  CHECK(with_machinery.model.query_head.w1 == base_only.model.query_head.w1);
  CHECK(with_machinery.model.image_head.w1 == base_only.model.image_head.w1);
}

TEST_CASE("train rejects undersized inputs and records the trace") {
  const auto data = small_dataset(17, 40);
  TrainConfig cfg = quick_config(18);
  cfg.beta = 1.0;
  const train::PreparedRun run = train::prepare_run(data.dataset, 0.0, cfg);
  CHECK_THROWS_AS(
      train::train(data.dataset, {}, run.triples, run.holdout, cfg), Error);

  const train::TrainResult result =
      train::train(data.dataset, run.pairs, run.triples, run.holdout, cfg);
  REQUIRE(result.trace.epochs.size() == cfg.epochs);
  for (const train::EpochStats& stats : result.trace.epochs) {
    CHECK(std::isfinite(stats.base_loss));
    CHECK(stats.penalty_loss >= 0.0);  // hinge mode
    CHECK(!stats.eval.entries.empty());
  }
}

TEST_CASE("holdout split is deterministic, sorted and disjoint from training") {
  const auto holdout = train::split_holdout(100, 0.2, Seed{19});
  CHECK(holdout.size() == 20);
  CHECK(std::is_sorted(holdout.begin(), holdout.end()));
  CHECK(holdout == train::split_holdout(100, 0.2, Seed{19}));
  CHECK(holdout != train::split_holdout(100, 0.2, Seed{20}));

  const auto data = small_dataset(21, 50);
  TrainConfig cfg = quick_config(22);
  const train::PreparedRun run = train::prepare_run(data.dataset, 50.0, cfg);
  std::set<std::size_t> held(run.holdout.begin(), run.holdout.end());
  for (const synth::TrainingPair& p : run.pairs) {
    CHECK(held.count(p.query_index) == 0);
  }
  for (const Triple& t : run.triples) {
    for (std::size_t idx : run.holdout) {
      CHECK(t.caption_id != data.dataset.queries[idx].query_id);
    }
  }
}

TEST_CASE("spearman_rho on monotone and tied data") {
  CHECK(train::spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) ==
        doctest::Approx(1.0));
  CHECK(train::spearman_rho({1, 2, 3, 4}, {9, 7, 5, 3}) ==
        doctest::Approx(-1.0));
  CHECK(std::fabs(train::spearman_rho({1, 2, 3, 4}, {1, 1, 1, 1})) <
        1e-12);
  CHECK_THROWS_AS(train::spearman_rho({1.0}, {2.0}), Error);
}
