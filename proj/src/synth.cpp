// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace irb::synth {

namespace {

std::string padded_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
  return buf;
}

Eigen::VectorXd random_unit(Rng& rng, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  const double n = v.norm();
  if (n < 1e-12) return random_unit(rng, dim);
  return v / n;
}

}  // namespace

SynthDataset synthesize(const SynthConfig& cfg) {
  if (cfg.num_queries == 0) {
    throw_error(Errc::invalid_argument, "num_queries must be positive");
  }
  if (cfg.dim < 4) {
    throw_error(Errc::invalid_argument, "dim must be at least 4");
  }
  if (cfg.sigma_q < 0.0 || cfg.lambda < 0.0) {
    throw_error(Errc::invalid_argument, "sigma_q and lambda must be >= 0");
  }
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) {
    throw_error(Errc::invalid_argument, "gamma must be in [0, 1]");
  }

  const auto n = static_cast<Eigen::Index>(cfg.num_queries);
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  Rng qry_rng(derive_seed(cfg.seed, 1));
  Rng noise_rng(derive_seed(cfg.seed, 2));
  Rng wm_rng(derive_seed(cfg.seed, 3));

  RowMatrix queries(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) queries(i, j) = qry_rng.normal();
  }
  l2_normalize_rows(queries);

  // Watermark: gamma of its energy along the mean query direction, the rest
  // along a fixed random direction orthogonalized against it.
  Eigen::VectorXd mean_q = queries.colwise().mean().transpose();
  const double mean_norm = mean_q.norm();
  if (mean_norm < 1e-12) {
    // isotropic cancellation; pick an arbitrary stable axis
    mean_q = Eigen::VectorXd::Unit(d, 0);
  } else {
    mean_q /= mean_norm;
  }
  Eigen::VectorXd u = random_unit(wm_rng, cfg.dim);
  u -= u.dot(mean_q) * mean_q;
  double u_norm = u.norm();
  while (u_norm < 1e-9) {
    u = random_unit(wm_rng, cfg.dim);
    u -= u.dot(mean_q) * mean_q;
    u_norm = u.norm();
  }
  u /= u_norm;
  Eigen::VectorXd w = cfg.gamma * mean_q + (1.0 - cfg.gamma) * u;
  const double w_norm = w.norm();
  if (w_norm < 1e-12) {
    throw_error(Errc::degenerate, "watermark direction degenerated");
  }
  w /= w_norm;

  RowMatrix images(2 * n, d);
  SynthDataset out;
  out.config = cfg;
  out.watermark = w;
  Dataset& ds = out.dataset;
  ds.items.reserve(static_cast<std::size_t>(2 * n));
  ds.queries.reserve(cfg.num_queries);

  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd real_raw = queries.row(i).transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
      real_raw[j] += cfg.sigma_q * noise_rng.normal();
    }
    const Eigen::VectorXd gen_raw = real_raw + cfg.lambda * w;

    const double rn = real_raw.norm();
    const double gn = gen_raw.norm();
    if (rn < 1e-12 || gn < 1e-12) {
      throw_error(Errc::zero_vector, "degenerate synthetic image vector");
    }
    images.row(2 * i) = (real_raw / rn).transpose();
    images.row(2 * i + 1) = (gen_raw / gn).transpose();

    // Alternate which provenance sorts first so exact ties at lambda = 0
    // split evenly across the corpus.
    const auto idx = static_cast<std::size_t>(i);
    const std::string base = padded_id("i", idx);
    const bool real_first = (i % 2 == 0);
    const std::string real_id = base + (real_first ? "a" : "b");
    const std::string gen_id = base + (real_first ? "b" : "a");
    const std::string query_id = padded_id("q", idx);

    CorpusItem real_item;
    real_item.item_id = real_id;
    real_item.row = static_cast<std::size_t>(2 * i);
    real_item.provenance = Provenance::Real;
    real_item.pair_id = gen_id;
    real_item.query_id = query_id;
    CorpusItem gen_item;
    gen_item.item_id = gen_id;
    gen_item.row = static_cast<std::size_t>(2 * i + 1);
    gen_item.provenance = Provenance::Generated;
    gen_item.pair_id = real_id;
    gen_item.query_id = query_id;
    ds.items.push_back(std::move(real_item));
    ds.items.push_back(std::move(gen_item));

    Query q;
    q.query_id = query_id;
    q.row = idx;
    q.relevant_real = real_id;
    q.relevant_generated = gen_id;
    ds.queries.push_back(std::move(q));
  }

  ds.qry_table.data = std::move(queries);
  ds.qry_table.normalized = true;
  ds.img_table.data = std::move(images);
  ds.img_table.normalized = true;
  ds.watermark = w;
  return out;
}

std::vector<TrainingPair> mix_training_set(const Dataset& ds, double alpha,
                                           Seed seed) {
  if (alpha < 0.0 || alpha > 100.0) {
    throw_error(Errc::invalid_argument, "alpha must be in [0, 100]");
  }
  std::unordered_map<std::string, const CorpusItem*> by_id;
  by_id.reserve(ds.items.size());
  for (const CorpusItem& item : ds.items) by_id.emplace(item.item_id, &item);

  const std::size_t n = ds.queries.size();
  const auto k = static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(n) / 100.0 + 0.5));

  // Seeded permutation; alpha <= 50 takes a prefix, alpha > 50 a suffix, so
  // complementary alphas select complementary caption subsets.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<char> generated(n, 0);
  if (alpha <= 50.0) {
    for (std::size_t i = 0; i < k; ++i) generated[order[i]] = 1;
  } else {
    for (std::size_t i = n - k; i < n; ++i) generated[order[i]] = 1;
  }

  std::vector<TrainingPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Query& q = ds.queries[i];
    if (!q.relevant_real || !q.relevant_generated ||
        !by_id.count(*q.relevant_real) || !by_id.count(*q.relevant_generated)) {
      throw_error(Errc::missing_counterpart,
                  "query '" + q.query_id + "' lacks a paired counterpart");
    }
    const bool want_generated = generated[i] != 0;
    const auto& chosen_id =
        want_generated ? q.relevant_generated : q.relevant_real;
    const CorpusItem& item = *by_id.at(*chosen_id);
    TrainingPair pair;
    pair.query_index = i;
    pair.caption_id = q.query_id;
    pair.caption_row = q.row;
    pair.image_id = item.item_id;
    pair.image_row = item.row;
    pair.image_provenance = item.provenance;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace irb::synth
