// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/encoder.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace irb::encoder {

namespace {

constexpr char kModelMagic[4] = {'D', 'E', 'M', '1'};
constexpr double kNormFloor = 1e-12;

void check_head(const ProjectionHead& head, std::size_t raw_dim,
                const char* what) {
  if (head.d_in() != raw_dim) {
    throw_error(Errc::dim_mismatch,
                std::string(what) + ": input dim " + std::to_string(raw_dim) +
                    " != head dim " + std::to_string(head.d_in()));
  }
}

// Forward pass over a batch with everything the backward pass needs.
struct ForwardCache {
  RowMatrix hidden;     // m x h, tanh activations (hidden arch only)
  RowMatrix pre_norm;   // m x out
  Eigen::VectorXd norms;  // m
  RowMatrix unit;       // m x out
};

ForwardCache forward_batch(const ProjectionHead& head, const RowMatrix& raw) {
  ForwardCache cache;
  if (head.has_hidden()) {
    cache.hidden =
        ((raw * head.w1.transpose()).rowwise() + head.b1.transpose())
            .array()
            .tanh();
    cache.pre_norm =
        (cache.hidden * head.w2.transpose()).rowwise() + head.b2.transpose();
  } else {
    cache.pre_norm =
        (raw * head.w1.transpose()).rowwise() + head.b1.transpose();
  }
  cache.norms = cache.pre_norm.rowwise().norm();
  for (Eigen::Index i = 0; i < cache.norms.size(); ++i) {
    if (cache.norms[i] < kNormFloor) {
      throw_error(Errc::zero_vector,
                  "encoded vector " + std::to_string(i) + " collapsed");
    }
  }
  cache.unit = cache.pre_norm.array().colwise() / cache.norms.array();
  return cache;
}

// Backprop d(loss)/d(unit rows) through the normalization and the layers,
// accumulating into head gradients.
void backward_batch(const ProjectionHead& head, const RowMatrix& raw,
                    const ForwardCache& cache, const RowMatrix& d_unit,
                    HeadGrads& grads) {
  // d/dx (x/|x|) = (I - u u^T)/|x|
  RowMatrix d_pre = d_unit;
  for (Eigen::Index i = 0; i < d_pre.rows(); ++i) {
    const double proj = d_unit.row(i).dot(cache.unit.row(i));
    d_pre.row(i) =
        (d_unit.row(i) - proj * cache.unit.row(i)) / cache.norms[i];
  }
  if (head.has_hidden()) {
    grads.w2.noalias() += d_pre.transpose() * cache.hidden;
    grads.b2 += d_pre.colwise().sum().transpose();
    RowMatrix d_hidden = d_pre * head.w2;
    d_hidden.array() *= 1.0 - cache.hidden.array().square();
    grads.w1.noalias() += d_hidden.transpose() * raw;
    grads.b1 += d_hidden.colwise().sum().transpose();
  } else {
    grads.w1.noalias() += d_pre.transpose() * raw;
    grads.b1 += d_pre.colwise().sum().transpose();
  }
}

HeadGrads head_zeros(const ProjectionHead& head) {
  HeadGrads g;
  g.w1 = Eigen::MatrixXd::Zero(head.w1.rows(), head.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(head.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(head.w2.rows(), head.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(head.b2.size());
  return g;
}

void fill_normal(Eigen::MatrixXd& m, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = scale * rng.normal();
    }
  }
}

void write_raw(std::ostream& os, const void* data, std::size_t bytes) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(bytes));
}

void write_u32(std::ostream& os, std::uint32_t v) {
  write_raw(os, &v, sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      write_raw(os, &v, sizeof(v));
    }
  }
}

void read_doubles(std::istream& is, double* dst, std::size_t count) {
  is.read(reinterpret_cast<char*>(dst),
          static_cast<std::streamsize>(count * sizeof(double)));
}

void read_matrix(std::istream& is, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = 0.0;
      read_doubles(is, &v, 1);
      m(i, j) = v;
    }
  }
}

void read_vector(std::istream& is, Eigen::VectorXd& v) {
  read_doubles(is, v.data(), static_cast<std::size_t>(v.size()));
}

}  // namespace

Eigen::VectorXd encode(const ProjectionHead& head,
                       const Eigen::VectorXd& raw) {
  check_head(head, static_cast<std::size_t>(raw.size()), "encode");
  Eigen::VectorXd pre;
  if (head.has_hidden()) {
    pre = head.w2 * (head.w1 * raw + head.b1).array().tanh().matrix() +
          head.b2;
  } else {
    pre = head.w1 * raw + head.b1;
  }
  const double norm = pre.norm();
  if (norm < kNormFloor) {
    throw_error(Errc::zero_vector, "encoded vector collapsed");
  }
  return pre / norm;
}

double model_score(const DualEncoderModel& model,
                   const Eigen::VectorXd& query_raw,
                   const Eigen::VectorXd& image_raw) {
  if (model.query_head.d_out() != model.image_head.d_out()) {
    throw_error(Errc::dim_mismatch, "heads disagree on scoring dimension");
  }
  return encode(model.query_head, query_raw)
      .dot(encode(model.image_head, image_raw));
}

EmbeddingTable encode_table(const ProjectionHead& head,
                            const EmbeddingTable& table) {
  check_head(head, table.dim(), "encode_table");
  const ForwardCache cache = forward_batch(head, table.data);
  EmbeddingTable out;
  out.data = cache.unit;
  out.normalized = true;
  return out;
}

DualEncoderModel init_model(std::size_t d_in_q, std::size_t d_in_i,
                            std::size_t d_out, Seed seed,
                            const InitOptions& opts) {
  if (d_in_q < 2 || d_in_i < 2 || d_out < 2) {
    throw_error(Errc::invalid_argument, "dims must be >= 2");
  }
  if (opts.identity && (d_in_q != d_out || d_in_i != d_out)) {
    throw_error(Errc::invalid_argument,
                "identity init requires d_out == d_in");
  }
  if (opts.identity && opts.hidden_dim != 0) {
    throw_error(Errc::invalid_argument, "identity init is linear only");
  }

  DualEncoderModel model;
  Rng rng(seed);
  const auto out = static_cast<Eigen::Index>(d_out);
  const auto make_head = [&](std::size_t d_in) {
    ProjectionHead head;
    const auto in = static_cast<Eigen::Index>(d_in);
    if (opts.identity) {
      head.w1 = Eigen::MatrixXd::Identity(out, in);
      head.b1 = Eigen::VectorXd::Zero(out);
    } else if (opts.hidden_dim == 0) {
      head.w1.resize(out, in);
      fill_normal(head.w1, rng, 1.0 / std::sqrt(static_cast<double>(d_in)));
      head.b1 = Eigen::VectorXd::Zero(out);
    } else {
      const auto h = static_cast<Eigen::Index>(opts.hidden_dim);
      head.w1.resize(h, in);
      fill_normal(head.w1, rng, 1.0 / std::sqrt(static_cast<double>(d_in)));
      head.b1 = Eigen::VectorXd::Zero(h);
      head.w2.resize(out, h);
      fill_normal(head.w2, rng,
                  1.0 / std::sqrt(static_cast<double>(opts.hidden_dim)));
      head.b2 = Eigen::VectorXd::Zero(out);
    }
    return head;
  };
  model.query_head = make_head(d_in_q);
  model.image_head = make_head(d_in_i);
  return model;
}

GradientSet zeros_like(const DualEncoderModel& model) {
  return GradientSet{head_zeros(model.query_head),
                     head_zeros(model.image_head)};
}

LossValue gradients(const DualEncoderModel& model, const PairBatch& pairs,
                    const TripleBatch& triples, const LossSpec& spec,
                    GradientSet* grads) {
  LossValue loss;

  if (spec.include_base) {
    const std::size_t m = pairs.size();
    if (m < 2) {
      throw_error(Errc::batch_too_small,
                  "contrastive batch needs at least 2 pairs");
    }
    const ForwardCache cq = forward_batch(model.query_head, pairs.captions);
    const ForwardCache ci = forward_batch(model.image_head, pairs.images);
    const double inv_tau = 1.0 / model.temperature;
    Eigen::MatrixXd logits =
        (cq.unit * ci.unit.transpose()) * inv_tau;  // m x m

    // Row direction: matching image among batch images; column direction:
    // matching caption among batch captions.
    const auto mi = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd row_soft(mi, mi), col_soft(mi, mi);
    double ce_sum = 0.0;
    for (Eigen::Index j = 0; j < mi; ++j) {
      const double mx = logits.row(j).maxCoeff();
      const Eigen::ArrayXd e = (logits.row(j).transpose().array() - mx).exp();
      const double z = e.sum();
      row_soft.row(j) = (e / z).transpose();
      ce_sum += -(logits(j, j) - mx - std::log(z));
    }
    for (Eigen::Index k = 0; k < mi; ++k) {
      const double mx = logits.col(k).maxCoeff();
      const Eigen::ArrayXd e = (logits.col(k).array() - mx).exp();
      const double z = e.sum();
      col_soft.col(k) = (e / z).matrix();
      ce_sum += -(logits(k, k) - mx - std::log(z));
    }
    loss.base = ce_sum / (2.0 * static_cast<double>(m));

    if (grads) {
      Eigen::MatrixXd g = row_soft + col_soft;
      g.diagonal().array() -= 2.0;
      g *= inv_tau / (2.0 * static_cast<double>(m));
      const RowMatrix d_uq = g * ci.unit;
      const RowMatrix d_ui = g.transpose() * cq.unit;
      backward_batch(model.query_head, pairs.captions, cq, d_uq,
                     grads->query);
      backward_batch(model.image_head, pairs.images, ci, d_ui, grads->image);
    }
  }

  if (spec.penalty != PenaltyKind::none && triples.size() > 0) {
    const ForwardCache cc = forward_batch(model.query_head, triples.captions);
    const ForwardCache cr = forward_batch(model.image_head, triples.reals);
    const ForwardCache cg = forward_batch(model.image_head, triples.gens);
    const auto t = static_cast<Eigen::Index>(triples.size());

    RowMatrix d_uc, d_ur, d_ug;
    if (grads) {
      d_uc = RowMatrix::Zero(t, cc.unit.cols());
      d_ur = RowMatrix::Zero(t, cr.unit.cols());
      d_ug = RowMatrix::Zero(t, cg.unit.cols());
    }
    for (Eigen::Index k = 0; k < t; ++k) {
      const double ds =
          cc.unit.row(k).dot(cg.unit.row(k)) -
          cc.unit.row(k).dot(cr.unit.row(k));
      double weight = 1.0;
      if (spec.penalty == PenaltyKind::hinge) {
        if (ds <= 0.0) continue;
        loss.penalty += ds;
      } else {
        loss.penalty += ds;
      }
      if (grads) {
        d_uc.row(k) += weight * (cg.unit.row(k) - cr.unit.row(k));
        d_ug.row(k) += weight * cc.unit.row(k);
        d_ur.row(k) -= weight * cc.unit.row(k);
      }
    }
    if (grads) {
      backward_batch(model.query_head, triples.captions, cc, d_uc,
                     grads->query);
      backward_batch(model.image_head, triples.reals, cr, d_ur,
                     grads->image);
      backward_batch(model.image_head, triples.gens, cg, d_ug,
                     grads->image);
    }
  }

  loss.total = loss.base + loss.penalty;
  return loss;
}

void save_model(const DualEncoderModel& model,
                const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw_error(Errc::io, "cannot open for writing: " + path.string());
  }
  const bool hidden = model.query_head.has_hidden();
  if (hidden != model.image_head.has_hidden()) {
    throw_error(Errc::invalid_argument, "heads disagree on architecture");
  }
  os.write(kModelMagic, 4);
  write_u32(os, 1);  // version
  write_u32(os, hidden ? 1 : 0);
  write_u32(os, static_cast<std::uint32_t>(model.query_head.d_in()));
  write_u32(os, static_cast<std::uint32_t>(model.image_head.d_in()));
  write_u32(os, hidden
                    ? static_cast<std::uint32_t>(model.query_head.w1.rows())
                    : 0u);
  write_u32(os, static_cast<std::uint32_t>(model.query_head.d_out()));
  const double tau = model.temperature;
  write_raw(os, &tau, sizeof(tau));
  for (const ProjectionHead* head :
       {&model.query_head, &model.image_head}) {
    write_matrix(os, head->w1);
    write_matrix(os, head->b1);
    if (hidden) {
      write_matrix(os, head->w2);
      write_matrix(os, head->b2);
    }
  }
  os.flush();
  if (!os) throw_error(Errc::io, "write failed: " + path.string());
}

DualEncoderModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw_error(Errc::io, "cannot open for reading: " + path.string());
  }
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw_error(Errc::bad_magic, "not a DEM1 checkpoint: " + path.string());
  }
  const std::uint32_t version = read_u32(is);
  if (version != 1) {
    throw_error(Errc::parse, "unsupported checkpoint version " +
                                 std::to_string(version));
  }
  const bool hidden = read_u32(is) != 0;
  const std::uint32_t d_in_q = read_u32(is);
  const std::uint32_t d_in_i = read_u32(is);
  const std::uint32_t d_hidden = read_u32(is);
  const std::uint32_t d_out = read_u32(is);
  DualEncoderModel model;
  is.read(reinterpret_cast<char*>(&model.temperature),
          sizeof(model.temperature));

  const auto load_head = [&](std::uint32_t d_in) {
    ProjectionHead head;
    if (hidden) {
      head.w1.resize(d_hidden, d_in);
      head.b1.resize(d_hidden);
      head.w2.resize(d_out, d_hidden);
      head.b2.resize(d_out);
    } else {
      head.w1.resize(d_out, d_in);
      head.b1.resize(d_out);
    }
    read_matrix(is, head.w1);
    read_vector(is, head.b1);
    if (hidden) {
      read_matrix(is, head.w2);
      read_vector(is, head.b2);
    }
    return head;
  };
  model.query_head = load_head(d_in_q);
  model.image_head = load_head(d_in_i);
  if (!is) {
    throw_error(Errc::length_mismatch,
                "checkpoint truncated: " + path.string());
  }
  // must be at EOF
  char extra;
  is.read(&extra, 1);
  if (!is.eof()) {
    throw_error(Errc::length_mismatch,
                "trailing bytes in checkpoint: " + path.string());
  }
  return model;
}

}  // namespace irb::encoder
