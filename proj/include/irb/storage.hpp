// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_STORAGE_HPP
#define IRB_STORAGE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irb/core.hpp"

namespace irb::storage {

using ordered_json = nlohmann::ordered_json;

// --- embedding files -------------------------------------------------------
//
// Layout: 4-byte magic "EMB1", u32 LE row count, u32 LE dim, then packed
// IEEE-754 binary32 LE values, row-major. File length must equal
// 12 + count * dim * 4.

void write_embeddings(const EmbeddingTable& table,
                      const std::filesystem::path& path);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

// --- metadata (line-delimited JSON records) --------------------------------

void write_metadata(const std::vector<CorpusItem>& items,
                    const std::vector<Query>& queries,
                    const std::filesystem::path& path);

struct MetadataBundle {
  std::vector<CorpusItem> items;
  std::vector<Query> queries;
};

// Parses records, partitions them by source and validates cross-references
// against the given tables. Throws Errc::parse with a line number on bad
// records and Errc::validation when validate_dataset reports issues.
MetadataBundle read_metadata(const std::filesystem::path& path,
                             const EmbeddingTable& img_table,
                             const EmbeddingTable& qry_table);

// --- dataset directories ----------------------------------------------------
//
// A dataset directory holds queries.emb, images.emb, metadata.jsonl and an
// optional synth.json sidecar with the ground-truth watermark.

void save_dataset(const Dataset& ds, const std::filesystem::path& dir,
                  const ordered_json* synth_sidecar = nullptr);
Dataset load_dataset(const std::filesystem::path& dir);

// --- reports ----------------------------------------------------------------
//
// Reports serialize with stable key order (insertion order) and floats
// printed at 6 significant digits, so reruns with equal inputs are
// byte-identical.

std::string fmt_g6(double v);
std::string dump_report(const ordered_json& doc);
void write_report(const ordered_json& doc, const std::filesystem::path& path);
ordered_json read_report(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Minimal SVG overlay histogram (two series of per-bin counts sharing one
// axis). Plots are a convenience; the CSV exports are the contract.
void write_histogram_svg(const std::vector<double>& bin_edges,
                         const std::vector<std::size_t>& counts_a,
                         const std::vector<std::size_t>& counts_b,
                         const std::string& label_a, const std::string& label_b,
                         const std::filesystem::path& path);

}  // namespace irb::storage

#endif  // IRB_STORAGE_HPP
