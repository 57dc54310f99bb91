#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antsess/log_ingest.hpp"

namespace antsess {

// Page-indexed vectors are stored sparsely; absent keys mean "not visited"
// (0 for counts and times, no value for dates).
template <typename T>
using SparseVector = std::map<PageIndex, T>;

// The nine-field session record.
struct Session {
  std::string client_id;
  std::optional<std::string> identity;
  Timestamp start_time{};
  std::vector<PageIndex> history;
  std::vector<Timestamp> visit_times;  // parallel to history
  std::vector<PageIndex> transaction_vector;  // sorted visited pages (the 1-entries)
  SparseVector<std::int64_t> time_vector;     // seconds
  SparseVector<Timestamp> date_vector;        // first visit
  SparseVector<std::int64_t> hits_vector;
  std::int64_t total_time = 0;

  std::size_t catalog_size = 0;
  std::uint64_t catalog_id = 0;

  bool visited(PageIndex p) const;
  bool empty() const { return transaction_vector.empty(); }

  bool operator==(const Session&) const = default;
};

struct TimeEstimate {
  std::vector<std::int64_t> dwell;        // per visit, in history order
  SparseVector<std::int64_t> time_vector;  // per page
  std::int64_t total_time = 0;
};

// Dwell time of each visit is the gap to the next request, floored at 1 s.
// The last visit gets the rounded mean of the other dwell times (1 s when it
// is the only visit). Throws std::invalid_argument on length mismatch, empty
// input or decreasing timestamps.
TimeEstimate estimate_times(std::span<const PageIndex> history,
                            std::span<const Timestamp> timestamps);

inline constexpr std::chrono::seconds kDefaultSessionTimeout{1800};

// Groups records per client (identity when known, else client_id), sorts
// each group by (timestamp, resource) and splits it wherever consecutive
// requests are more than `timeout` apart. Sessions are returned ordered by
// (start_time, client key).
std::vector<Session> sessionize(const std::vector<LogRecord>& records,
                                const PageCatalog& catalog,
                                std::chrono::seconds timeout = kDefaultSessionTimeout);

// Human-readable descriptions of violated record invariants; empty when the
// session is consistent.
std::vector<std::string> check_session(const Session& session);

// Session interchange file: a header line {"catalog": {...}} followed by one
// JSON object per session.
struct SessionDump {
  PageCatalog catalog;
  std::vector<Session> sessions;
  std::int64_t transactions = 0;
};

void write_sessions_jsonl(std::ostream& out, const SessionDump& dump);
SessionDump read_sessions_jsonl(std::istream& in);
SessionDump read_sessions_file(const std::string& path);

}  // namespace antsess
