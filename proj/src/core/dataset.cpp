#include "core/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace medroute {

namespace {
constexpr const char* kHeader = "source_url,question_text,specialization";
}

LabelCodec LabelCodec::fit(const Dataset& ds) {
  require(!ds.records.empty(), ErrorKind::InvalidArgument,
          "cannot fit label codec on an empty dataset");
  std::set<std::string> uniq;
  for (const auto& r : ds.records) uniq.insert(r.specialization);
  return from_labels({uniq.begin(), uniq.end()});
}

LabelCodec LabelCodec::from_labels(std::vector<std::string> sorted_labels) {
  LabelCodec c;
  c.labels_ = std::move(sorted_labels);
  for (size_t i = 0; i < c.labels_.size(); ++i)
    c.index_[c.labels_[i]] = int(i);
  require(c.index_.size() == c.labels_.size(), ErrorKind::InvalidArgument,
          "duplicate labels in codec");
  return c;
}

int LabelCodec::encode(const std::string& label) const {
  auto it = index_.find(label);
  require(it != index_.end(), ErrorKind::InvalidArgument,
          "unknown label: " + label);
  return it->second;
}

const std::string& LabelCodec::decode(int id) const {
  require(id >= 0 && id < int(labels_.size()), ErrorKind::InvalidArgument,
          "class id out of range: " + std::to_string(id));
  return labels_[size_t(id)];
}

Dataset dedupe(const Dataset& ds) {
  Dataset out;
  out.created_at = ds.created_at;
  out.provenance = ds.provenance;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : ds.records)
    if (seen.emplace(r.question_text, r.specialization).second)
      out.records.push_back(r);
  return out;
}

DatasetStats stats(const Dataset& ds) {
  DatasetStats s;
  for (const auto& r : ds.records) ++s.per_class_counts[r.specialization];
  s.total = ds.records.size();
  return s;
}

std::string write_csv_string(const Dataset& ds) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : ds.records)
    out += csv::format_row({r.source_url, r.question_text, r.specialization});
  return out;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open for writing: " + path);
  f << write_csv_string(ds);
  require(f.good(), ErrorKind::Io, "write failed: " + path);
}

Dataset read_csv_string(const std::string& text) {
  auto rows = csv::parse(text);
  require(!rows.empty(), ErrorKind::Schema, "empty CSV: missing header row");
  const auto& header = rows[0].fields;
  std::vector<std::string> expected = {"source_url", "question_text",
                                       "specialization"};
  if (header != expected) {
    for (const auto& col : expected)
      if (std::find(header.begin(), header.end(), col) == header.end())
        fail(ErrorKind::Schema, "CSV header missing column: " + col);
    fail(ErrorKind::Schema, "CSV header mismatch, expected: " +
                                std::string(kHeader));
  }
  Dataset ds;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank
    require(row.fields.size() == 3, ErrorKind::Parse,
            "line " + std::to_string(row.line) + ": expected 3 fields, got " +
                std::to_string(row.fields.size()));
    ds.records.push_back({row.fields[0], row.fields[1], row.fields[2]});
  }
  return ds;
}

Dataset read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return read_csv_string(ss.str());
}

}  // namespace medroute
