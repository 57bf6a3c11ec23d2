#include "core/ingest.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "core/error.hpp"
#include "core/html.hpp"
#include "core/unicode.hpp"

namespace fs = std::filesystem;

namespace medroute {

namespace {

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ParsedUrl {
  std::string scheme;
  std::string host_port;  // scheme://host[:port] for httplib
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  size_t sep = url.find("://");
  require(sep != std::string::npos, ErrorKind::InvalidArgument,
          "URL without scheme: " + url);
  ParsedUrl p;
  p.scheme = url.substr(0, sep);
  if (p.scheme == "file") {
    p.path = url.substr(sep + 3);
    return p;
  }
  size_t host_start = sep + 3;
  size_t path_start = url.find('/', host_start);
  if (path_start == std::string::npos) {
    p.host_port = url;
    p.path = "/";
  } else {
    p.host_port = url.substr(0, path_start);
    p.path = url.substr(path_start);
  }
  return p;
}

// Enforces a minimum gap of 1/rate seconds between request starts per
// host. Callers block until their slot.
class RateLimiter {
 public:
  explicit RateLimiter(double rate) : gap_(1.0 / rate) {}

  void acquire(const std::string& host) {
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      auto now = std::chrono::steady_clock::now();
      auto& next = next_[host];
      slot = std::max(now, next);
      next = slot + std::chrono::duration_cast<
                        std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(gap_));
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  double gap_;
  std::mutex mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_;
};

RawPage fetch_one(const SourceSpec& source, const std::string& url,
                  bool allow_network, RateLimiter& limiter) {
  RawPage page;
  page.url = url;
  page.fetched_at = now_iso8601();

  ParsedUrl parsed = parse_url(url);
  if (parsed.scheme == "file") {
    std::ifstream f(parsed.path, std::ios::binary);
    if (!f.good()) {
      page.http_status = RawPage::kTransportError;
      page.error = "cannot read fixture file: " + parsed.path;
      return page;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    page.html = ss.str();
    page.http_status = RawPage::kLocalFixture;
    if (page.html.empty()) page.error = "empty fixture file";
    return page;
  }

  require(parsed.scheme == "http" || parsed.scheme == "https",
          ErrorKind::InvalidArgument, "unsupported URL scheme: " + url);
  require(allow_network, ErrorKind::InvalidArgument,
          "remote URL with networking disabled (pass --allow-network): " +
              url);

  for (int attempt = 0; attempt <= source.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(100 * (1 << (attempt - 1))));
    limiter.acquire(parsed.host_port);
    httplib::Client client(parsed.host_port);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    auto res = client.Get(parsed.path);
    if (!res) {
      page.http_status = RawPage::kTransportError;
      page.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    page.http_status = res->status;
    if (res->status >= 200 && res->status < 300) {
      page.html = res->body;
      page.error.clear();
      return page;
    }
    page.error = "HTTP status " + std::to_string(res->status);
  }
  return page;
}

}  // namespace

void SourceSpec::validate() const {
  require(!source_id.empty(), ErrorKind::InvalidArgument,
          "source_id must be non-empty");
  require(rate_limit > 0.0, ErrorKind::InvalidArgument,
          "rate_limit must be > 0");
  require(max_in_flight >= 1, ErrorKind::InvalidArgument,
          "max_in_flight must be >= 1");
  require(retries >= 0, ErrorKind::InvalidArgument, "retries must be >= 0");
  require(!extraction_rules.question_selector.empty() &&
              !extraction_rules.specialization_selector.empty(),
          ErrorKind::InvalidArgument, "extraction selectors must be non-empty");
  html::parse_selector(extraction_rules.question_selector);
  html::parse_selector(extraction_rules.specialization_selector);
}

SourceSpec source_spec_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  SourceSpec s;
  s.source_id = j.at("source_id");
  s.base_url = j.value("base_url", "");
  s.extraction_rules.question_selector =
      j.at("extraction_rules").at("question_selector");
  s.extraction_rules.specialization_selector =
      j.at("extraction_rules").at("specialization_selector");
  s.rate_limit = j.value("rate_limit", 1.0);
  s.max_in_flight = j.value("max_in_flight", 1);
  s.retries = j.value("retries", 2);
  s.validate();
  return s;
}

SourceSpec load_source_spec(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open source spec: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return source_spec_from_json(ss.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, "invalid source spec " + path + ": " + e.what());
  }
}

std::vector<RawPage> fetch_pages(const SourceSpec& source,
                                 const std::vector<std::string>& urls,
                                 bool allow_network) {
  source.validate();
  require(!urls.empty(), ErrorKind::InvalidArgument, "empty URL list");

  RateLimiter limiter(source.rate_limit);
  std::vector<RawPage> pages;
  std::mutex out_mu;
  std::atomic<size_t> cursor{0};

  size_t n_workers =
      std::min(size_t(source.max_in_flight), urls.size());
  std::vector<std::thread> workers;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      while (true) {
        size_t i = cursor.fetch_add(1);
        if (i >= urls.size()) return;
        try {
          RawPage page = fetch_one(source, urls[i], allow_network, limiter);
          std::lock_guard lock(out_mu);
          pages.push_back(std::move(page));
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return pages;
}

QARecord extract_record(const RawPage& page, const ExtractionRules& rules) {
  auto root = html::parse(page.html);
  auto q_sel = html::parse_selector(rules.question_selector);
  auto s_sel = html::parse_selector(rules.specialization_selector);
  const html::Node* q = html::find_first(*root, q_sel);
  const html::Node* s = html::find_first(*root, s_sel);
  if (!q && !s)
    fail(ErrorKind::Parse, "MissingField: " + rules.question_selector +
                               ", " + rules.specialization_selector);
  if (!q) fail(ErrorKind::Parse, "MissingField: " + rules.question_selector);
  if (!s)
    fail(ErrorKind::Parse,
         "MissingField: " + rules.specialization_selector);
  return {page.url, html::text_content(*q), html::text_content(*s)};
}

IngestSummary run_ingest(const SourceSpec& source,
                         const std::vector<std::string>& urls,
                         const std::string& out_dir, bool allow_network) {
  auto pages = fetch_pages(source, urls, allow_network);
  fs::create_directories(out_dir);

  nlohmann::json manifest = nlohmann::json::array();
  IngestSummary summary;
  for (size_t i = 0; i < pages.size(); ++i) {
    const RawPage& page = pages[i];
    char name[32];
    std::snprintf(name, sizeof name, "page_%04zu.html", i);
    nlohmann::json entry;
    entry["url"] = page.url;
    entry["fetched_at"] = page.fetched_at;
    if (page.http_status == RawPage::kLocalFixture)
      entry["status"] = "local-fixture";
    else
      entry["status"] = page.http_status;
    if (page.ok()) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      require(f.good(), ErrorKind::Io, "cannot write page file in " + out_dir);
      f << page.html;
      entry["file"] = name;
      ++summary.fetched;
    } else {
      entry["error"] = page.error;
      ++summary.failed;
    }
    manifest.push_back(std::move(entry));
  }
  std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
  require(mf.good(), ErrorKind::Io, "cannot write manifest in " + out_dir);
  mf << manifest.dump(2) << "\n";
  return summary;
}

BuildSummary build_dataset_from_pages(const std::string& pages_dir,
                                      const ExtractionRules& rules) {
  std::ifstream mf(fs::path(pages_dir) / "manifest.json", std::ios::binary);
  require(mf.good(), ErrorKind::Io,
          "cannot open manifest.json in " + pages_dir);
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("invalid manifest.json: ") + e.what());
  }

  BuildSummary out;
  out.dataset.created_at = now_iso8601();
  out.dataset.provenance = "built from pages in " + pages_dir;
  for (const auto& entry : manifest) {
    std::string url = entry.value("url", "");
    if (!entry.contains("file")) {
      out.skips.push_back(url + ": " + entry.value("error", "fetch failed"));
      continue;
    }
    RawPage page;
    page.url = url;
    std::ifstream pf(fs::path(pages_dir) / entry["file"].get<std::string>(),
                     std::ios::binary);
    require(pf.good(), ErrorKind::Io,
            "manifest references missing page file in " + pages_dir);
    std::ostringstream ss;
    ss << pf.rdbuf();
    page.html = ss.str();
    try {
      QARecord rec = extract_record(page, rules);
      rec.question_text = unicode::normalize_text(rec.question_text);
      rec.specialization = unicode::normalize_text(rec.specialization);
      if (rec.question_text.empty() || rec.specialization.empty()) {
        out.skips.push_back(url + ": empty field after normalization");
        continue;
      }
      out.dataset.records.push_back(std::move(rec));
    } catch (const Error& e) {
      out.skips.push_back(url + ": " + e.what());
    }
  }
  out.dataset = dedupe(out.dataset);
  return out;
}

std::vector<std::string> read_url_list(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open URL list: " + path);
  std::vector<std::string> urls;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') urls.push_back(line);
  }
  return urls;
}

}  // namespace medroute
