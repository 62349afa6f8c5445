// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "irb/bias.hpp"
#include "irb/synth.hpp"

using namespace irb;

TEST_CASE("synthesize validates its configuration") {
  synth::SynthConfig cfg;
  cfg.dim = 2;
  CHECK_THROWS_AS(synth::synthesize(cfg), Error);
  cfg.dim = 8;
  cfg.lambda = -0.1;
  CHECK_THROWS_AS(synth::synthesize(cfg), Error);
  cfg.lambda = 0.1;
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(synth::synthesize(cfg), Error);
}

TEST_CASE("lambda zero makes generated rows equal real rows bit-for-bit") {
  synth::SynthConfig cfg;
  cfg.num_queries = 40;
  cfg.dim = 16;
  cfg.lambda = 0.0;
  cfg.seed = Seed{4};
  const auto data = synth::synthesize(cfg);
  const Dataset& ds = data.dataset;
  REQUIRE(ds.items.size() == 80);
  for (const Query& q : ds.queries) {
    REQUIRE(q.relevant_real);
    REQUIRE(q.relevant_generated);
  }
  for (std::size_t i = 0; i < 40; ++i) {
    const Eigen::VectorXd real = ds.img_table.row_vec(2 * i);
    const Eigen::VectorXd gen = ds.img_table.row_vec(2 * i + 1);
    CHECK(real == gen);
  }
}

TEST_CASE("synthesize is deterministic per seed") {
  synth::SynthConfig cfg;
  cfg.num_queries = 25;
  cfg.dim = 12;
  cfg.seed = Seed{123};
  const auto a = synth::synthesize(cfg);
  const auto b = synth::synthesize(cfg);
  CHECK(a.dataset.img_table.data == b.dataset.img_table.data);
  CHECK(a.dataset.qry_table.data == b.dataset.qry_table.data);
  CHECK(a.watermark == b.watermark);

  cfg.seed = Seed{124};
  const auto c = synth::synthesize(cfg);
  CHECK(a.dataset.img_table.data != c.dataset.img_table.data);
}

TEST_CASE("synthesized tables are unit-normalized and validated") {
  synth::SynthConfig cfg;
  cfg.num_queries = 30;
  cfg.dim = 10;
  cfg.seed = Seed{6};
  const auto data = synth::synthesize(cfg);
  for (std::size_t i = 0; i < data.dataset.img_table.rows(); ++i) {
    CHECK(data.dataset.img_table.data.row(static_cast<Eigen::Index>(i))
              .norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(data.watermark.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(validate_dataset(data.dataset.items, data.dataset.queries,
                         data.dataset.img_table, data.dataset.qry_table)
            .ok());
}

TEST_CASE("generated-minus-real score gap grows with lambda") {
  double prev_gap = -1.0;
  for (const double lambda : {0.0, 0.05, 0.1, 0.2}) {
    synth::SynthConfig cfg;
    cfg.num_queries = 300;
    cfg.dim = 64;
    cfg.lambda = lambda;
    cfg.gamma = 1.0;
    cfg.seed = Seed{42};  // fixed seed across the sweep
    const auto data = synth::synthesize(cfg);
    const auto dist = bias::score_distribution(
        data.dataset.queries, data.dataset.items, data.dataset.qry_table,
        data.dataset.img_table, 10);
    const double gap = dist.mean_generated - dist.mean_real;
    CHECK(gap >= prev_gap - 1e-12);
    prev_gap = gap;
  }
}

TEST_CASE("mix_training_set counts and determinism") {
  synth::SynthConfig cfg;
  cfg.num_queries = 10;
  cfg.dim = 8;
  cfg.seed = Seed{50};
  const auto data = synth::synthesize(cfg);

  const auto count_generated = [](const std::vector<synth::TrainingPair>& v) {
    std::size_t n = 0;
    for (const auto& p : v) n += (p.image_provenance == Provenance::Generated);
    return n;
  };

  const auto all_real = synth::mix_training_set(data.dataset, 0.0, Seed{1});
  CHECK(all_real.size() == 10);
  CHECK(count_generated(all_real) == 0);

  const auto all_gen = synth::mix_training_set(data.dataset, 100.0, Seed{1});
  CHECK(count_generated(all_gen) == 10);

  const auto mixed = synth::mix_training_set(data.dataset, 40.0, Seed{1});
  CHECK(count_generated(mixed) == 4);
  const auto mixed_again = synth::mix_training_set(data.dataset, 40.0, Seed{1});
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    CHECK(mixed[i].image_id == mixed_again[i].image_id);
  }
}

TEST_CASE("mix_training_set complements alpha and 100-alpha") {
  synth::SynthConfig cfg;
  cfg.num_queries = 10;
  cfg.dim = 8;
  cfg.seed = Seed{51};
  const auto data = synth::synthesize(cfg);

  const auto selection = [&](double alpha) {
    std::set<std::string> generated;
    for (const auto& p :
         synth::mix_training_set(data.dataset, alpha, Seed{9})) {
      if (p.image_provenance == Provenance::Generated) {
        generated.insert(p.caption_id);
      }
    }
    return generated;
  };
  const auto low = selection(40.0);
  const auto high = selection(60.0);
  CHECK(low.size() == 4);
  CHECK(high.size() == 6);
  for (const std::string& c : low) CHECK(high.count(c) == 0);
}

TEST_CASE("mix_training_set requires both counterparts") {
  synth::SynthConfig cfg;
  cfg.num_queries = 4;
  cfg.dim = 8;
  cfg.seed = Seed{52};
  auto data = synth::synthesize(cfg);
  data.dataset.queries[1].relevant_generated.reset();
  CHECK_THROWS_AS(synth::mix_training_set(data.dataset, 0.0, Seed{1}), Error);
}

TEST_CASE("an orthogonal watermark leaves the ranking unbiased") {
  // gamma = 0 with queries confined to the orthogonal complement of the
  // watermark axis: scores move only through renormalization.
  const std::size_t n = 500, dim = 32;
  Rng rng(Seed{53});
  EmbeddingTable qry(n, dim);
  qry.data.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < dim; ++j) {
      qry.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.normal();
    }
  }
  qry = l2_normalize(qry);

  EmbeddingTable img(2 * n, dim);
  std::vector<CorpusItem> items;
  std::vector<Query> queries;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd real_raw = qry.row_vec(i);
    for (std::size_t j = 0; j < dim; ++j) {
      real_raw[static_cast<Eigen::Index>(j)] += 0.5 * rng.normal();
    }
    Eigen::VectorXd gen_raw = real_raw;
    gen_raw[dim - 1] += 0.15;
    img.data.row(static_cast<Eigen::Index>(2 * i)) =
        (real_raw / real_raw.norm()).transpose();
    img.data.row(static_cast<Eigen::Index>(2 * i + 1)) =
        (gen_raw / gen_raw.norm()).transpose();
    const std::string rid = "r" + std::to_string(i);
    const std::string gid = "g" + std::to_string(i);
    const std::string qid = "q" + std::to_string(i);
    items.push_back({rid, 2 * i, Provenance::Real, gid, qid});
    items.push_back({gid, 2 * i + 1, Provenance::Generated, rid, qid});
    queries.push_back({qid, i, rid, gid});
  }
  img.normalized = true;

  const auto report = bias::evaluate_bias(
      queries, items, qry, img, {{ranking::MetricKind::NDCG, 1}});
  CHECK(std::fabs(report.entries[0].relative_delta) < 3.0);
}
