#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"

namespace medroute {

struct ExtractionRules {
  std::string question_selector;
  std::string specialization_selector;
};

struct SourceSpec {
  std::string source_id;
  std::string base_url;
  ExtractionRules extraction_rules;
  double rate_limit = 1.0;   // requests per second, per host
  int max_in_flight = 1;
  int retries = 2;           // exponential backoff on failure

  void validate() const;
};

SourceSpec source_spec_from_json(const std::string& json_text);
SourceSpec load_source_spec(const std::string& path);

// http_status >= 100: real HTTP status. Local fixtures and transport
// failures use the sentinels below.
struct RawPage {
  std::string url;
  std::string html;
  std::string fetched_at;  // ISO-8601 UTC
  int http_status = 0;
  std::string error;       // non-empty on recorded failure

  static constexpr int kLocalFixture = 0;
  static constexpr int kTransportError = -1;

  bool ok() const {
    return error.empty() &&
           (http_status == kLocalFixture ||
            (http_status >= 200 && http_status < 300));
  }
};

// Fetches every URL (file:// fixtures always; http(s) only when
// allow_network). Bounded concurrency (max_in_flight), per-host rate
// limiting, bounded retries. One RawPage per URL, completion order.
std::vector<RawPage> fetch_pages(const SourceSpec& source,
                                 const std::vector<std::string>& urls,
                                 bool allow_network);

// Throws Error{Parse} ("MissingField: <selector>") when a selector
// matches nothing. Fields are returned as-is (no normalization).
QARecord extract_record(const RawPage& page, const ExtractionRules& rules);

struct IngestSummary {
  size_t fetched = 0;
  size_t failed = 0;
};

// Fetch + persist under out_dir as page_NNNN.html plus manifest.json.
IngestSummary run_ingest(const SourceSpec& source,
                         const std::vector<std::string>& urls,
                         const std::string& out_dir, bool allow_network);

struct BuildSummary {
  Dataset dataset;  // normalized and deduplicated
  std::vector<std::string> skips;  // one reason per skipped page
};

BuildSummary build_dataset_from_pages(const std::string& pages_dir,
                                      const ExtractionRules& rules);

std::vector<std::string> read_url_list(const std::string& path);

}  // namespace medroute
