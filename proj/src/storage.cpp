// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#include "irb/storage.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace irb::storage {

namespace {

constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};

void put_u32_le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

[[noreturn]] void io_fail(const std::filesystem::path& path,
                          const std::string& what) {
  throw_error(Errc::io, what + ": " + path.string());
}

}  // namespace

void write_embeddings(const EmbeddingTable& table,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_fail(path, "cannot open for writing");

  os.write(kEmbMagic, 4);
  put_u32_le(os, static_cast<std::uint32_t>(table.rows()));
  put_u32_le(os, static_cast<std::uint32_t>(table.dim()));

  std::vector<float> row(table.dim());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const double* src = table.row_ptr(i);
    for (std::size_t j = 0; j < table.dim(); ++j) {
      row[j] = static_cast<float>(src[j]);
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  os.flush();
  if (!os) io_fail(path, "write failed");
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_fail(path, "cannot open for reading");

  unsigned char header[12];
  is.read(reinterpret_cast<char*>(header), 12);
  if (is.gcount() != 12) {
    throw_error(Errc::length_mismatch,
                "file shorter than header: " + path.string());
  }
  if (std::memcmp(header, kEmbMagic, 4) != 0) {
    throw_error(Errc::bad_magic, "not an EMB1 file: " + path.string());
  }
  const std::uint32_t count = get_u32_le(header + 4);
  const std::uint32_t dim = get_u32_le(header + 8);

  is.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(is.tellg());
  const std::uint64_t expected =
      12ull + static_cast<std::uint64_t>(count) * dim * sizeof(float);
  if (file_size != expected) {
    throw_error(Errc::length_mismatch,
                "file length " + std::to_string(file_size) + " != expected " +
                    std::to_string(expected) + ": " + path.string());
  }
  is.seekg(12, std::ios::beg);

  EmbeddingTable table(count, dim);
  std::vector<float> row(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!is) io_fail(path, "read failed");
    for (std::uint32_t j = 0; j < dim; ++j) {
      table.data(i, j) = static_cast<double>(row[j]);
    }
  }
  return table;
}

namespace {

std::optional<std::string> opt_string(const nlohmann::json& rec,
                                      const char* key) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw_error(Errc::parse, std::string("key '") + key + "' is not a string");
  }
  return it->get<std::string>();
}

}  // namespace

void write_metadata(const std::vector<CorpusItem>& items,
                    const std::vector<Query>& queries,
                    const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) io_fail(path, "cannot open for writing");

  const auto str_or_null = [](const std::optional<std::string>& s) {
    return s ? ordered_json(*s) : ordered_json(nullptr);
  };
  for (const CorpusItem& item : items) {
    ordered_json rec;
    rec["id"] = item.item_id;
    rec["row"] = item.row;
    rec["source"] = provenance_name(item.provenance);
    rec["pair_id"] = str_or_null(item.pair_id);
    rec["query_id"] = item.query_id;
    os << rec.dump() << '\n';
  }
  for (const Query& q : queries) {
    ordered_json rec;
    rec["id"] = q.query_id;
    rec["row"] = q.row;
    rec["source"] = "query";
    rec["relevant_real"] = str_or_null(q.relevant_real);
    rec["relevant_generated"] = str_or_null(q.relevant_generated);
    os << rec.dump() << '\n';
  }
  os.flush();
  if (!os) io_fail(path, "write failed");
}

MetadataBundle read_metadata(const std::filesystem::path& path,
                             const EmbeddingTable& img_table,
                             const EmbeddingTable& qry_table) {
  std::ifstream is(path);
  if (!is) io_fail(path, "cannot open for reading");

  MetadataBundle bundle;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> item_rows;
  std::vector<std::size_t> query_rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
      if (!rec.is_object()) throw_error(Errc::parse, "record is not an object");

      const std::string id = rec.at("id").get<std::string>();
      const std::size_t row = rec.at("row").get<std::size_t>();
      const std::string source = rec.at("source").get<std::string>();
      if (source == "real" || source == "generated") {
        CorpusItem item;
        item.item_id = id;
        item.row = row;
        item.provenance =
            source == "real" ? Provenance::Real : Provenance::Generated;
        item.pair_id = opt_string(rec, "pair_id");
        if (auto qid = opt_string(rec, "query_id")) item.query_id = *qid;
        item_rows.push_back(row);
        bundle.items.push_back(std::move(item));
      } else if (source == "query") {
        Query q;
        q.query_id = id;
        q.row = row;
        q.relevant_real = opt_string(rec, "relevant_real");
        q.relevant_generated = opt_string(rec, "relevant_generated");
        query_rows.push_back(row);
        bundle.queries.push_back(std::move(q));
      } else {
        throw_error(Errc::parse, "unknown source '" + source + "'");
      }
    } catch (const Error&) {
      throw Error(Errc::parse, "line " + std::to_string(line_no) + " of " +
                                   path.string());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse, "line " + std::to_string(line_no) + " of " +
                                   path.string() + ": " + e.what());
    }
  }

  // Row indices must be unique per file (one file per table family).
  const auto check_unique = [&](std::vector<std::size_t>& rows,
                                const char* what) {
    std::sort(rows.begin(), rows.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end()) {
      throw_error(Errc::parse,
                  std::string("duplicate ") + what + " row index in " +
                      path.string());
    }
  };
  check_unique(item_rows, "item");
  check_unique(query_rows, "query");

  const ValidationReport report =
      validate_dataset(bundle.items, bundle.queries, img_table, qry_table);
  if (!report.ok()) {
    std::string msg = "metadata validation failed:";
    for (const ValidationIssue& issue : report.issues) {
      msg += "\n  [" + issue.kind + "] " + issue.message;
    }
    throw_error(Errc::validation, msg);
  }
  return bundle;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir,
                  const ordered_json* synth_sidecar) {
  std::filesystem::create_directories(dir);
  write_embeddings(ds.qry_table, dir / "queries.emb");
  write_embeddings(ds.img_table, dir / "images.emb");
  write_metadata(ds.items, ds.queries, dir / "metadata.jsonl");
  if (synth_sidecar) {
    write_report(*synth_sidecar, dir / "synth.json");
  }
}

namespace {

// Rows written from normalized tables come back unit within binary32
// rounding; leaving them untouched keeps save(load(dir)) byte-identical.
EmbeddingTable normalize_on_load(EmbeddingTable table) {
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const double norm =
        table.data.row(static_cast<Eigen::Index>(i)).norm();
    if (std::fabs(norm - 1.0) > 1e-6) {
      return l2_normalize(table);
    }
  }
  table.normalized = true;
  return table;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.img_table = normalize_on_load(read_embeddings(dir / "images.emb"));
  ds.qry_table = normalize_on_load(read_embeddings(dir / "queries.emb"));
  MetadataBundle bundle =
      read_metadata(dir / "metadata.jsonl", ds.img_table, ds.qry_table);
  ds.items = std::move(bundle.items);
  ds.queries = std::move(bundle.queries);

  const auto sidecar = dir / "synth.json";
  if (std::filesystem::exists(sidecar)) {
    const ordered_json doc = read_report(sidecar);
    if (doc.contains("watermark")) {
      const auto& arr = doc.at("watermark");
      Eigen::VectorXd w(arr.size());
      for (std::size_t i = 0; i < arr.size(); ++i) {
        w[static_cast<Eigen::Index>(i)] = arr.at(i).get<double>();
      }
      ds.watermark = std::move(w);
    }
  }
  return ds;
}

std::string fmt_g6(double v) {
  if (v == 0.0) v = 0.0;  // collapse negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

void dump_value(const ordered_json& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + ordered_json(it.key()).dump() + ": ";
        dump_value(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_value(el, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? fmt_g6(d) : "null";
      return;
    }
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_report(const ordered_json& doc) {
  std::string out;
  dump_value(doc, out, 0);
  out += "\n";
  return out;
}

void write_report(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_fail(path, "cannot open for writing");
  const std::string body = dump_report(doc);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  os.flush();
  if (!os) io_fail(path, "write failed");
}

ordered_json read_report(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) io_fail(path, "cannot open for reading");
  try {
    return ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, path.string() + ": " + e.what());
  }
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_fail(path, "cannot open for writing");
  const auto write_row = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  write_row(header);
  for (const auto& row : rows) write_row(row);
  os.flush();
  if (!os) io_fail(path, "write failed");
}

void write_histogram_svg(const std::vector<double>& bin_edges,
                         const std::vector<std::size_t>& counts_a,
                         const std::vector<std::size_t>& counts_b,
                         const std::string& label_a, const std::string& label_b,
                         const std::filesystem::path& path) {
  const int width = 640;
  const int height = 400;
  const int ml = 50, mr = 20, mt = 30, mb = 40;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;
  const std::size_t bins = counts_a.size();

  std::size_t max_count = 1;
  for (std::size_t c : counts_a) max_count = std::max(max_count, c);
  for (std::size_t c : counts_b) max_count = std::max(max_count, c);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  const auto bar = [&](std::size_t i, std::size_t count,
                       const char* color) {
    if (count == 0) return;
    const double x = ml + plot_w * static_cast<double>(i) /
                              static_cast<double>(bins);
    const double w = plot_w / static_cast<double>(bins);
    const double h =
        plot_h * static_cast<double>(count) / static_cast<double>(max_count);
    svg << "<rect x=\"" << fmt_g6(x) << "\" y=\"" << fmt_g6(mt + plot_h - h)
        << "\" width=\"" << fmt_g6(w) << "\" height=\"" << fmt_g6(h)
        << "\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>\n";
  };
  for (std::size_t i = 0; i < bins; ++i) bar(i, counts_a[i], "#1f77b4");
  for (std::size_t i = 0; i < bins; ++i) bar(i, counts_b[i], "#ff7f0e");

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  if (!bin_edges.empty()) {
    svg << "<text x=\"" << ml << "\" y=\"" << height - 12
        << "\" font-size=\"12\">" << fmt_g6(bin_edges.front()) << "</text>\n";
    svg << "<text x=\"" << ml + plot_w - 40 << "\" y=\"" << height - 12
        << "\" font-size=\"12\">" << fmt_g6(bin_edges.back()) << "</text>\n";
  }
  svg << "<text x=\"12\" y=\"" << mt + 4 << "\" font-size=\"12\">"
      << max_count << "</text>\n";
  svg << "<rect x=\"" << ml + 10 << "\" y=\"" << mt + 6
      << "\" width=\"12\" height=\"12\" fill=\"#1f77b4\" "
         "fill-opacity=\"0.5\"/>\n";
  svg << "<text x=\"" << ml + 26 << "\" y=\"" << mt + 16
      << "\" font-size=\"12\">" << label_a << "</text>\n";
  svg << "<rect x=\"" << ml + 10 << "\" y=\"" << mt + 24
      << "\" width=\"12\" height=\"12\" fill=\"#ff7f0e\" "
         "fill-opacity=\"0.5\"/>\n";
  svg << "<text x=\"" << ml + 26 << "\" y=\"" << mt + 34
      << "\" font-size=\"12\">" << label_b << "</text>\n";
  svg << "</svg>\n";

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_fail(path, "cannot open for writing");
  const std::string body = svg.str();
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  os.flush();
  if (!os) io_fail(path, "write failed");
}

}  // namespace irb::storage
