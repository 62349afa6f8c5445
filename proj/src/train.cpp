// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace irb::train {

namespace {

// Independent RNG streams within one training run.
enum Stream : std::uint64_t {
  kStreamSplit = 101,
  kStreamMix = 102,
  kStreamInit = 103,
  kStreamShuffle = 104,
  kStreamSample = 105,
};

RowMatrix gather_rows(const EmbeddingTable& table,
                      const std::vector<std::size_t>& rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(table.dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        table.data.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

encoder::PairBatch make_pair_batch(const Dataset& ds,
                                   const std::vector<synth::TrainingPair>& batch) {
  std::vector<std::size_t> caption_rows, image_rows;
  caption_rows.reserve(batch.size());
  image_rows.reserve(batch.size());
  for (const synth::TrainingPair& p : batch) {
    caption_rows.push_back(p.caption_row);
    image_rows.push_back(p.image_row);
  }
  return {gather_rows(ds.qry_table, caption_rows),
          gather_rows(ds.img_table, image_rows)};
}

encoder::TripleBatch make_triple_batch(const Dataset& ds,
                                       const std::vector<Triple>& triples) {
  std::vector<std::size_t> caption_rows, real_rows, gen_rows;
  caption_rows.reserve(triples.size());
  real_rows.reserve(triples.size());
  gen_rows.reserve(triples.size());
  for (const Triple& t : triples) {
    caption_rows.push_back(t.caption_row);
    real_rows.push_back(t.real_row);
    gen_rows.push_back(t.generated_row);
  }
  return {gather_rows(ds.qry_table, caption_rows),
          gather_rows(ds.img_table, real_rows),
          gather_rows(ds.img_table, gen_rows)};
}

encoder::PenaltyKind penalty_kind(PenaltyMode mode) {
  return mode == PenaltyMode::indicator_hinge ? encoder::PenaltyKind::hinge
                                              : encoder::PenaltyKind::raw;
}

void sgd_step(encoder::DualEncoderModel& model, encoder::GradientSet& velocity,
              const encoder::GradientSet& grads, double lr, double momentum) {
  const auto update = [&](Eigen::MatrixXd& p, Eigen::MatrixXd& v,
                          const Eigen::MatrixXd& g) {
    if (p.size() == 0) return;
    v = momentum * v - lr * g;
    p += v;
  };
  const auto update_vec = [&](Eigen::VectorXd& p, Eigen::VectorXd& v,
                              const Eigen::VectorXd& g) {
    if (p.size() == 0) return;
    v = momentum * v - lr * g;
    p += v;
  };
  update(model.query_head.w1, velocity.query.w1, grads.query.w1);
  update_vec(model.query_head.b1, velocity.query.b1, grads.query.b1);
  update(model.query_head.w2, velocity.query.w2, grads.query.w2);
  update_vec(model.query_head.b2, velocity.query.b2, grads.query.b2);
  update(model.image_head.w1, velocity.image.w1, grads.image.w1);
  update_vec(model.image_head.b1, velocity.image.b1, grads.image.b1);
  update(model.image_head.w2, velocity.image.w2, grads.image.w2);
  update_vec(model.image_head.b2, velocity.image.b2, grads.image.b2);
}

// Runs fn(i) for i in [0, n) over a fixed thread count. Results must be
// written into preallocated slots so scheduling cannot reorder anything.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < count; ++w) {
    workers.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (std::thread& t : workers) t.join();
}

}  // namespace

std::vector<Triple> make_triples(const Dataset& ds) {
  std::unordered_map<std::string, const CorpusItem*> by_id;
  by_id.reserve(ds.items.size());
  for (const CorpusItem& item : ds.items) by_id.emplace(item.item_id, &item);

  std::vector<Triple> triples;
  triples.reserve(ds.queries.size());
  for (const Query& q : ds.queries) {
    if (!q.relevant_real || !q.relevant_generated) continue;
    auto r = by_id.find(*q.relevant_real);
    auto g = by_id.find(*q.relevant_generated);
    if (r == by_id.end() || g == by_id.end()) {
      throw_error(Errc::missing_counterpart,
                  "query '" + q.query_id + "' references absent items");
    }
    Triple t;
    t.caption_id = q.query_id;
    t.real_id = r->second->item_id;
    t.generated_id = g->second->item_id;
    t.caption_row = q.row;
    t.real_row = r->second->row;
    t.generated_row = g->second->row;
    triples.push_back(std::move(t));
  }
  return triples;
}

std::vector<std::size_t> split_holdout(std::size_t num_queries,
                                       double fraction, Seed seed) {
  if (fraction < 0.0 || fraction >= 1.0) {
    throw_error(Errc::invalid_argument, "holdout fraction must be in [0, 1)");
  }
  const auto count = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(num_queries) + 0.5));
  std::vector<std::size_t> order(num_queries);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kStreamSplit));
  rng.shuffle(order);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

double delta_s(const encoder::DualEncoderModel& model, const Dataset& ds,
               const Triple& triple) {
  const Eigen::VectorXd caption = ds.qry_table.row_vec(triple.caption_row);
  const Eigen::VectorXd real = ds.img_table.row_vec(triple.real_row);
  const Eigen::VectorXd gen = ds.img_table.row_vec(triple.generated_row);
  return encoder::model_score(model, caption, gen) -
         encoder::model_score(model, caption, real);
}

std::vector<Triple> sample_B(const encoder::DualEncoderModel& model,
                             const Dataset& ds,
                             const std::vector<Triple>& triples, double beta,
                             Seed seed) {
  if (beta < 0.0 || beta > 1.0) {
    throw_error(Errc::invalid_argument, "beta must be in [0, 1]");
  }
  std::vector<Triple> sampled;
  if (beta == 0.0 || triples.empty()) return sampled;

  // One full forward pass in evaluation mode; scores all rows once.
  const EmbeddingTable enc_q =
      encoder::encode_table(model.query_head, ds.qry_table);
  const EmbeddingTable enc_i =
      encoder::encode_table(model.image_head, ds.img_table);
  const std::size_t dim = enc_q.dim();

  Rng rng(seed);
  for (const Triple& t : triples) {
    const double* c = enc_q.row_ptr(t.caption_row);
    const double ds_val =
        ranking::score(c, enc_i.row_ptr(t.generated_row), dim) -
        ranking::score(c, enc_i.row_ptr(t.real_row), dim);
    if (ds_val <= 0.0) continue;
    if (rng.bernoulli(beta)) sampled.push_back(t);
  }
  return sampled;
}

encoder::LossValue base_loss(const encoder::DualEncoderModel& model,
                             const Dataset& ds,
                             const std::vector<synth::TrainingPair>& batch,
                             encoder::GradientSet* grads) {
  return encoder::gradients(model, make_pair_batch(ds, batch), {},
                            {true, encoder::PenaltyKind::none}, grads);
}

encoder::LossValue total_loss(const encoder::DualEncoderModel& model,
                              const Dataset& ds,
                              const std::vector<synth::TrainingPair>& batch,
                              const std::vector<Triple>& sampled_triples,
                              PenaltyMode mode, encoder::GradientSet* grads) {
  return encoder::gradients(model, make_pair_batch(ds, batch),
                            make_triple_batch(ds, sampled_triples),
                            {true, penalty_kind(mode)}, grads);
}

HoldoutEval evaluate_on_holdout(const encoder::DualEncoderModel& model,
                                const Dataset& ds,
                                const std::vector<std::size_t>& holdout,
                                unsigned distribution_bins) {
  HoldoutEval out;
  if (holdout.empty()) return out;

  const EmbeddingTable enc_q =
      encoder::encode_table(model.query_head, ds.qry_table);
  const EmbeddingTable enc_i =
      encoder::encode_table(model.image_head, ds.img_table);

  std::vector<Query> queries;
  queries.reserve(holdout.size());
  std::unordered_set<std::string> query_ids;
  for (std::size_t idx : holdout) {
    queries.push_back(ds.queries[idx]);
    query_ids.insert(ds.queries[idx].query_id);
  }
  std::vector<CorpusItem> items, real_items, generated_items;
  for (const CorpusItem& item : ds.items) {
    if (!query_ids.count(item.query_id)) continue;
    items.push_back(item);
    if (item.provenance == Provenance::Real) real_items.push_back(item);
    else generated_items.push_back(item);
  }

  out.report = bias::evaluate_bias(queries, items, enc_q, enc_i,
                                   ranking::default_specs());
  const ranking::MetricSpec ndcg5{ranking::MetricKind::NDCG, 5};
  const bias::ParityResult parity = bias::parity_check(
      queries, real_items, generated_items, enc_q, enc_i, ndcg5);
  out.ndcg_real_only = parity.metric_real_only;
  out.ndcg_generated_only = parity.metric_generated_only;
  out.distribution =
      bias::score_distribution(queries, items, enc_q, enc_i,
                               distribution_bins);
  return out;
}

TrainResult train(const Dataset& ds,
                  const std::vector<synth::TrainingPair>& pairs,
                  const std::vector<Triple>& triples,
                  const std::vector<std::size_t>& holdout_queries,
                  const TrainConfig& cfg) {
  if (pairs.size() < 2) {
    throw_error(Errc::batch_too_small, "need at least 2 training pairs");
  }
  const std::size_t d_out = cfg.d_out ? cfg.d_out : ds.qry_table.dim();
  encoder::DualEncoderModel model = encoder::init_model(
      ds.qry_table.dim(), ds.img_table.dim(), d_out,
      derive_seed(cfg.seed, kStreamInit), {cfg.hidden_dim, false});
  model.temperature = cfg.temperature;

  encoder::GradientSet velocity = encoder::zeros_like(model);
  TrainResult result;
  result.trace.epochs.reserve(cfg.epochs);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  const Seed shuffle_base = derive_seed(cfg.seed, kStreamShuffle);
  const Seed sample_base = derive_seed(cfg.seed, kStreamSample);

  for (unsigned epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Set B under epoch-start parameters.
    const std::vector<Triple> sampled =
        sample_B(model, ds, triples, cfg.beta, derive_seed(sample_base, epoch));
    std::unordered_map<std::string, const Triple*> sampled_by_caption;
    sampled_by_caption.reserve(sampled.size());
    for (const Triple& t : sampled) {
      sampled_by_caption.emplace(t.caption_id, &t);
    }

    Rng shuffle_rng(derive_seed(shuffle_base, epoch));
    shuffle_rng.shuffle(order);

    double base_sum = 0.0;
    double penalty_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + cfg.batch_size);
      if (end - start < 2) continue;  // a lone tail pair cannot contrast

      std::vector<synth::TrainingPair> batch;
      batch.reserve(end - start);
      std::vector<Triple> batch_triples;
      for (std::size_t i = start; i < end; ++i) {
        const synth::TrainingPair& p = pairs[order[i]];
        batch.push_back(p);
        auto it = sampled_by_caption.find(p.caption_id);
        if (it != sampled_by_caption.end()) {
          batch_triples.push_back(*it->second);
        }
      }

      encoder::GradientSet grads = encoder::zeros_like(model);
      const encoder::LossValue loss =
          total_loss(model, ds, batch, batch_triples, cfg.penalty_mode,
                     &grads);
      if (!std::isfinite(loss.total)) {
        throw_error(Errc::nonfinite,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(start / cfg.batch_size));
      }
      sgd_step(model, velocity, grads, cfg.learning_rate, cfg.momentum);

      base_sum += loss.base * static_cast<double>(batch.size());
      penalty_sum += loss.penalty;
      seen += batch.size();
    }

    EpochStats stats;
    stats.base_loss = seen ? base_sum / static_cast<double>(seen) : 0.0;
    stats.penalty_loss = penalty_sum;
    stats.sampled_triple_count = sampled.size();
    stats.eval = evaluate_on_holdout(model, ds, holdout_queries).report;
    result.trace.epochs.push_back(std::move(stats));
  }

  result.model = std::move(model);
  return result;
}

namespace {

// Training pairs restricted to captions outside the holdout.
std::vector<synth::TrainingPair> training_subset(
    const std::vector<synth::TrainingPair>& pairs,
    const std::vector<std::size_t>& holdout) {
  std::unordered_set<std::size_t> held(holdout.begin(), holdout.end());
  std::vector<synth::TrainingPair> subset;
  subset.reserve(pairs.size());
  for (const synth::TrainingPair& p : pairs) {
    if (!held.count(p.query_index)) subset.push_back(p);
  }
  return subset;
}

std::vector<Triple> training_triples(const Dataset& ds,
                                     const std::vector<std::size_t>& holdout) {
  std::unordered_set<std::string> held;
  for (std::size_t idx : holdout) held.insert(ds.queries[idx].query_id);
  std::vector<Triple> all = make_triples(ds);
  std::vector<Triple> subset;
  subset.reserve(all.size());
  for (Triple& t : all) {
    if (!held.count(t.caption_id)) subset.push_back(std::move(t));
  }
  return subset;
}

}  // namespace

PreparedRun prepare_run(const Dataset& ds, double alpha,
                        const TrainConfig& cfg) {
  PreparedRun run;
  run.holdout =
      split_holdout(ds.queries.size(), cfg.holdout_fraction, cfg.seed);
  run.pairs = training_subset(
      synth::mix_training_set(ds, alpha, derive_seed(cfg.seed, kStreamMix)),
      run.holdout);
  run.triples = training_triples(ds, run.holdout);
  return run;
}

std::vector<SweepAlphaRow> sweep_alpha(const Dataset& ds,
                                       const std::vector<double>& alphas,
                                       const TrainConfig& cfg, unsigned jobs) {
  std::vector<SweepAlphaRow> rows(alphas.size());
  parallel_for(alphas.size(), jobs, [&](std::size_t i) {
    const double alpha = alphas[i];
    const PreparedRun run = prepare_run(ds, alpha, cfg);
    TrainConfig run_cfg = cfg;
    run_cfg.beta = 0.0;  // contamination sweep trains without debiasing
    const TrainResult trained =
        train(ds, run.pairs, run.triples, run.holdout, run_cfg);
    const HoldoutEval eval =
        evaluate_on_holdout(trained.model, ds, run.holdout);
    rows[i] = {alpha, eval.report, eval.ndcg_real_only,
               eval.ndcg_generated_only};
  });
  return rows;
}

std::vector<SweepBetaRow> sweep_beta(const Dataset& ds,
                                     const std::vector<double>& betas,
                                     const TrainConfig& cfg, unsigned jobs) {
  const PreparedRun run = prepare_run(ds, 0.0, cfg);

  std::vector<SweepBetaRow> rows(betas.size());
  parallel_for(betas.size(), jobs, [&](std::size_t i) {
    TrainConfig run_cfg = cfg;
    run_cfg.beta = betas[i];
    const TrainResult trained =
        train(ds, run.pairs, run.triples, run.holdout, run_cfg);
    const HoldoutEval eval =
        evaluate_on_holdout(trained.model, ds, run.holdout);
    rows[i] = {betas[i], eval.report, eval.ndcg_real_only, eval.distribution};
  });
  return rows;
}

double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw_error(Errc::invalid_argument,
                "spearman_rho needs two equal-length series of >= 2 points");
  }
  const auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) /
                             2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += rx[i]; my += ry[i]; }
  mx /= n; my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace irb::train
