// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/core.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace irb {

namespace {

void add_issue(ValidationReport& report, const std::string& kind,
               const std::string& message) {
  report.issues.push_back({kind, message});
}

}  // namespace

ValidationReport validate_dataset(const std::vector<CorpusItem>& items,
                                  const std::vector<Query>& queries,
                                  const EmbeddingTable& img_table,
                                  const EmbeddingTable& qry_table) {
  ValidationReport report;

  std::unordered_map<std::string, const CorpusItem*> by_id;
  by_id.reserve(items.size());
  for (const CorpusItem& item : items) {
    if (item.provenance == Provenance::Query) {
      add_issue(report, "item provenance",
                "item '" + item.item_id + "' tagged as query");
    }
    if (item.row >= img_table.rows()) {
      add_issue(report, "dangling row",
                "item '" + item.item_id + "' references row " +
                    std::to_string(item.row) + " in a " +
                    std::to_string(img_table.rows()) + "-row table");
    }
    auto [it, inserted] = by_id.emplace(item.item_id, &item);
    if (!inserted) {
      add_issue(report, "duplicate item_id", "item '" + item.item_id + "'");
    }
  }

  std::unordered_set<std::string> query_ids;
  query_ids.reserve(queries.size());
  for (const Query& q : queries) {
    if (!query_ids.insert(q.query_id).second) {
      add_issue(report, "duplicate query_id", "query '" + q.query_id + "'");
    }
  }

  for (const CorpusItem& item : items) {
    if (item.pair_id) {
      auto it = by_id.find(*item.pair_id);
      if (it == by_id.end()) {
        add_issue(report, "dangling pair",
                  "item '" + item.item_id + "' pairs with absent '" +
                      *item.pair_id + "'");
      } else {
        const CorpusItem& pair = *it->second;
        if (pair.provenance == item.provenance) {
          add_issue(report, "pair provenance",
                    "items '" + item.item_id + "' and '" + pair.item_id +
                        "' share provenance " +
                        provenance_name(item.provenance));
        }
        if (!pair.pair_id || *pair.pair_id != item.item_id) {
          add_issue(report, "pair symmetry",
                    "item '" + *item.pair_id + "' does not pair back to '" +
                        item.item_id + "'");
        }
      }
    }
    if (!item.query_id.empty() && !query_ids.count(item.query_id)) {
      add_issue(report, "dangling query_id",
                "item '" + item.item_id + "' references absent query '" +
                    item.query_id + "'");
    }
  }

  for (const Query& q : queries) {
    if (q.row >= qry_table.rows()) {
      add_issue(report, "dangling row",
                "query '" + q.query_id + "' references row " +
                    std::to_string(q.row) + " in a " +
                    std::to_string(qry_table.rows()) + "-row table");
    }
    if (!q.relevant_real && !q.relevant_generated) {
      add_issue(report, "no relevant item",
                "query '" + q.query_id + "' lists no relevant item");
    }
    const auto check_relevant = [&](const std::optional<std::string>& id,
                                    Provenance expected) {
      if (!id) return;
      auto it = by_id.find(*id);
      if (it == by_id.end()) {
        add_issue(report, "dangling relevant item",
                  "query '" + q.query_id + "' references absent '" + *id +
                      "'");
      } else if (it->second->provenance != expected) {
        add_issue(report, "relevant provenance",
                  "query '" + q.query_id + "' lists '" + *id + "' as " +
                      provenance_name(expected) + " but it is " +
                      provenance_name(it->second->provenance));
      }
    };
    check_relevant(q.relevant_real, Provenance::Real);
    check_relevant(q.relevant_generated, Provenance::Generated);
  }

  return report;
}

void l2_normalize_rows(RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm < 1e-12) {
      throw_error(Errc::zero_vector,
                  "row " + std::to_string(i) + " has near-zero norm");
    }
    m.row(i) /= norm;
  }
}

EmbeddingTable l2_normalize(const EmbeddingTable& table) {
  EmbeddingTable out = table;
  l2_normalize_rows(out.data);
  out.normalized = true;
  return out;
}

}  // namespace irb
