#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace antsess {

using Timestamp = std::chrono::sys_seconds;
using PageIndex = std::uint32_t;

enum class LogFormat { CommonLogFormat, CombinedLogFormat, CsvTriples };

// One parsed access-log line. Timestamps are UTC.
struct LogRecord {
  std::string client_id;
  std::optional<std::string> identity;  // CLF authuser, when not "-"
  Timestamp timestamp{};
  std::string resource;
  int status = 200;
  std::int64_t bytes = 0;
  std::optional<std::string> referrer;
  std::optional<std::string> user_agent;

  bool operator==(const LogRecord&) const = default;
};

struct MalformedLine {
  std::size_t line_number = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<LogRecord> records;
  std::vector<MalformedLine> warnings;
};

// Parses a line-oriented stream. Malformed lines are reported in
// `warnings` and skipped; blank lines are ignored. Throws UnreadableSource
// when the stream fails for reasons other than end-of-file.
ParseResult parse_log(std::istream& source, LogFormat format);
ParseResult parse_log_file(const std::string& path, LogFormat format);

// Single-line parse; nullopt with `reason` filled on failure.
std::optional<LogRecord> parse_line(std::string_view line, LogFormat format,
                                    std::string* reason = nullptr);

// Lowercases, strips the query string/fragment and trailing slashes.
std::string normalize_resource(std::string_view raw);

// Parses "10/Mar/2014:13:55:36 +0100" and converts to UTC.
std::optional<Timestamp> parse_clf_time(std::string_view text);
std::string format_clf_time(Timestamp t);

// Renders a record as a CLF (or Combined) line that parse_line reads back.
std::string format_clf(const LogRecord& record, bool combined = false);

std::optional<LogFormat> log_format_from_string(std::string_view name);
std::string_view to_string(LogFormat format);

struct FilterPolicy {
  std::vector<std::string> excluded_extensions{".gif", ".jpg", ".jpeg", ".png",
                                               ".css", ".js",  ".ico"};
  // Inclusive status ranges.
  std::vector<std::pair<int, int>> accepted_status{{200, 299}, {304, 304}};

  bool accepts(const LogRecord& record) const;
};

std::vector<LogRecord> filter_page_requests(const std::vector<LogRecord>& records,
                                            const FilterPolicy& policy = {});

// Distinct resources in order of first appearance.
class PageCatalog {
 public:
  PageCatalog() = default;
  explicit PageCatalog(std::vector<std::string> pages);

  std::size_t size() const { return pages_.size(); }
  bool empty() const { return pages_.empty(); }
  const std::vector<std::string>& pages() const { return pages_; }
  const std::string& page(PageIndex k) const { return pages_.at(k); }
  std::optional<PageIndex> find(const std::string& path) const;

  // Adds `path` if absent; returns its position.
  PageIndex intern(const std::string& path);

  // FNV-1a over the ordered page list; sessions carry it so that
  // similarity can refuse to compare across catalogs.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<std::string> pages_;
  std::unordered_map<std::string, PageIndex> index_;
  std::uint64_t fingerprint_ = 14695981039346656037ull;  // FNV-1a offset basis
};

PageCatalog build_catalog(const std::vector<LogRecord>& records);

// One JSON object per line, used by --dump-records.
void write_records_jsonl(std::ostream& out, const std::vector<LogRecord>& records);

}  // namespace antsess
