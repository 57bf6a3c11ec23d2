#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace medroute {

// One (question text, specialization label, source URL) triple.
struct QARecord {
  std::string source_url;
  std::string question_text;
  std::string specialization;

  bool operator==(const QARecord&) const = default;
};

// Synthetic (augmented) records carry this URL scheme in source_url so
// evaluation can keep them out of test folds.
inline constexpr const char* kSyntheticUrlPrefix = "augment://";

inline bool is_synthetic(const QARecord& r) {
  return r.source_url.starts_with(kSyntheticUrlPrefix);
}

struct Dataset {
  std::vector<QARecord> records;
  std::string created_at;   // ISO-8601, informational
  std::string provenance;   // free-text note

  size_t size() const { return records.size(); }
};

// Bijective specialization-name <-> class-id map. Labels are sorted by
// Unicode code point so the codec is identical across runs and machines.
class LabelCodec {
 public:
  static LabelCodec fit(const Dataset& ds);
  static LabelCodec from_labels(std::vector<std::string> sorted_labels);

  int encode(const std::string& label) const;
  const std::string& decode(int id) const;
  int num_classes() const { return int(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct DatasetStats {
  std::map<std::string, size_t> per_class_counts;
  size_t total = 0;
};

// Keeps the first occurrence of each (question_text, specialization) pair.
Dataset dedupe(const Dataset& ds);

DatasetStats stats(const Dataset& ds);

// CSV persistence: UTF-8, RFC-4180 quoting, LF line endings, header
// `source_url,question_text,specialization`.
void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(const std::string& path);

std::string write_csv_string(const Dataset& ds);
Dataset read_csv_string(const std::string& text);

}  // namespace medroute
