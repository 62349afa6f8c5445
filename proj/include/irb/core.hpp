// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_CORE_HPP
#define IRB_CORE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "irb/error.hpp"
#include "irb/rng.hpp"

namespace irb {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row matrix of embedding vectors keyed by row index. Stored in
// binary64 for computation; the on-disk format is binary32 (see storage).
struct EmbeddingTable {
  RowMatrix data;
  bool normalized = false;

  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, std::size_t dim)
      : data(RowMatrix::Zero(static_cast<Eigen::Index>(rows),
                             static_cast<Eigen::Index>(dim))) {}

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }

  const double* row_ptr(std::size_t i) const {
    return data.data() + i * dim();
  }
  Eigen::VectorXd row_vec(std::size_t i) const {
    return data.row(static_cast<Eigen::Index>(i)).transpose();
  }
};

enum class Provenance { Real, Generated, Query };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Real: return "real";
    case Provenance::Generated: return "generated";
    case Provenance::Query: return "query";
  }
  return "?";
}

// A corpus image described by its embedding row. pair_id links the real and
// generated counterparts that share one caption.
struct CorpusItem {
  std::string item_id;
  std::size_t row = 0;
  Provenance provenance = Provenance::Real;
  std::optional<std::string> pair_id;
  std::string query_id;
};

struct Query {
  std::string query_id;
  std::size_t row = 0;
  std::optional<std::string> relevant_real;
  std::optional<std::string> relevant_generated;
};

// In-memory dataset: tables plus provenance-tagged items and queries.
// watermark carries the synthetic ground-truth direction when present.
struct Dataset {
  EmbeddingTable qry_table;
  EmbeddingTable img_table;
  std::vector<CorpusItem> items;
  std::vector<Query> queries;
  std::optional<Eigen::VectorXd> watermark;
};

struct ValidationIssue {
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks every dataset invariant (dangling row indices, duplicate ids,
// broken pair symmetry, provenance mismatches). Violations are report
// entries, not failures. Idempotent and side-effect free.
ValidationReport validate_dataset(const std::vector<CorpusItem>& items,
                                  const std::vector<Query>& queries,
                                  const EmbeddingTable& img_table,
                                  const EmbeddingTable& qry_table);

// Returns a copy of the table with every row scaled to unit Euclidean norm.
// Throws Errc::zero_vector if a row norm is below 1e-12.
EmbeddingTable l2_normalize(const EmbeddingTable& table);

// In-place variant used by table producers.
void l2_normalize_rows(RowMatrix& m);

}  // namespace irb

#endif  // IRB_CORE_HPP
