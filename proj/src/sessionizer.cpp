#include "antsess/sessionizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "antsess/error.hpp"

namespace antsess {

using json = nlohmann::ordered_json;

bool Session::visited(PageIndex p) const {
  return std::binary_search(transaction_vector.begin(), transaction_vector.end(), p);
}

TimeEstimate estimate_times(std::span<const PageIndex> history,
                            std::span<const Timestamp> timestamps) {
  if (history.size() != timestamps.size())
    throw std::invalid_argument("estimate_times: history and timestamps differ in length");
  if (history.empty()) throw std::invalid_argument("estimate_times: empty history");

  const auto n = history.size();
  TimeEstimate est;
  est.dwell.resize(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto gap = (timestamps[k + 1] - timestamps[k]).count();
    if (gap < 0) throw std::invalid_argument("estimate_times: timestamps decrease");
    est.dwell[k] = std::max<std::int64_t>(gap, 1);
  }
  if (n == 1) {
    est.dwell[0] = 1;
  } else {
    const auto others = std::accumulate(est.dwell.begin(), est.dwell.end() - 1, std::int64_t{0});
    // Round half up; the mean of values >= 1 is itself >= 1.
    const auto count = static_cast<std::int64_t>(n - 1);
    est.dwell[n - 1] = std::max<std::int64_t>((2 * others + count) / (2 * count), 1);
  }
  for (std::size_t k = 0; k < n; ++k) {
    est.time_vector[history[k]] += est.dwell[k];
    est.total_time += est.dwell[k];
  }
  return est;
}

namespace {

const std::string& client_key(const LogRecord& r) {
  return r.identity ? *r.identity : r.client_id;
}

Session build_session(const std::vector<const LogRecord*>& run, const PageCatalog& catalog) {
  Session s;
  s.client_id = run.front()->client_id;
  s.identity = run.front()->identity;
  s.start_time = run.front()->timestamp;
  s.catalog_size = catalog.size();
  s.catalog_id = catalog.fingerprint();
  s.history.reserve(run.size());
  s.visit_times.reserve(run.size());
  for (const LogRecord* r : run) {
    const auto page = catalog.find(r->resource);
    if (!page) throw InputError("resource not in catalog: " + r->resource);
    s.history.push_back(*page);
    s.visit_times.push_back(r->timestamp);
    s.hits_vector[*page] += 1;
    s.date_vector.try_emplace(*page, r->timestamp);
  }
  auto est = estimate_times(s.history, s.visit_times);
  s.time_vector = std::move(est.time_vector);
  s.total_time = est.total_time;
  s.transaction_vector.reserve(s.hits_vector.size());
  for (const auto& [page, hits] : s.hits_vector) s.transaction_vector.push_back(page);
  return s;
}

}  // namespace

std::vector<Session> sessionize(const std::vector<LogRecord>& records,
                                const PageCatalog& catalog, std::chrono::seconds timeout) {
  if (timeout.count() <= 0) throw ConfigError("session timeout must be positive");
  if (records.empty()) return {};
  if (catalog.empty()) throw EmptyCatalog("page catalog is empty but records are not");

  std::unordered_map<std::string_view, std::vector<const LogRecord*>> by_client;
  std::vector<std::string_view> client_order;
  for (const auto& r : records) {
    auto [it, inserted] = by_client.try_emplace(client_key(r));
    if (inserted) client_order.push_back(it->first);
    it->second.push_back(&r);
  }

  std::vector<Session> sessions;
  std::vector<const LogRecord*> run;
  for (auto key : client_order) {
    auto& group = by_client[key];
    // Resource breaks timestamp ties so that the result does not depend on
    // the input order of one client's records.
    std::sort(group.begin(), group.end(), [](const LogRecord* a, const LogRecord* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->resource < b->resource;
    });
    run.clear();
    for (const LogRecord* r : group) {
      if (!run.empty() && r->timestamp - run.back()->timestamp > timeout) {
        sessions.push_back(build_session(run, catalog));
        run.clear();
      }
      run.push_back(r);
    }
    sessions.push_back(build_session(run, catalog));
  }

  std::sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    if (a.start_time != b.start_time) return a.start_time < b.start_time;
    return (a.identity ? *a.identity : a.client_id) < (b.identity ? *b.identity : b.client_id);
  });
  return sessions;
}

std::vector<std::string> check_session(const Session& s) {
  std::vector<std::string> problems;
  auto complain = [&](std::string msg) { problems.push_back(std::move(msg)); };

  if (s.history.size() != s.visit_times.size()) complain("history/visit_times length mismatch");
  for (auto p : s.history)
    if (p >= s.catalog_size) complain("history index outside catalog");

  std::vector<PageIndex> distinct(s.history.begin(), s.history.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct != s.transaction_vector) complain("transaction vector != visited set of history");

  auto keys_match = [&](const auto& vec, auto&& positive) {
    if (vec.size() != s.transaction_vector.size()) return false;
    auto it = s.transaction_vector.begin();
    for (const auto& [page, value] : vec) {
      if (page != *it++ || !positive(value)) return false;
    }
    return true;
  };
  if (!keys_match(s.hits_vector, [](std::int64_t h) { return h >= 1; }))
    complain("hits vector support differs from transaction vector");
  if (!keys_match(s.time_vector, [](std::int64_t t) { return t >= 1; }))
    complain("time vector support differs from transaction vector (or entry < 1 s)");
  if (!keys_match(s.date_vector, [](Timestamp) { return true; }))
    complain("date vector support differs from transaction vector");

  std::int64_t hits = 0;
  for (const auto& [page, h] : s.hits_vector) hits += h;
  if (hits != static_cast<std::int64_t>(s.history.size())) complain("sum(hits) != |history|");

  if (s.history.size() == s.visit_times.size()) {
    for (std::size_t k = 0; k < s.history.size(); ++k) {
      const auto it = s.date_vector.find(s.history[k]);
      const bool first = std::find(s.history.begin(), s.history.begin() + k, s.history[k]) ==
                         s.history.begin() + k;
      if (first && (it == s.date_vector.end() || it->second != s.visit_times[k]))
        complain("date vector entry is not the first visit time");
    }
    if (!s.visit_times.empty() && s.start_time != s.visit_times.front())
      complain("start_time != first visit time");
  }

  std::int64_t total = 0;
  for (const auto& [page, t] : s.time_vector) total += t;
  if (total != s.total_time) complain("total_time != sum(time vector)");
  return problems;
}

namespace {

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return out;
}

template <typename T, typename F>
json sparse_to_json(const SparseVector<T>& vec, F&& convert) {
  json j = json::object();
  for (const auto& [page, value] : vec) j[std::to_string(page)] = convert(value);
  return j;
}

std::int64_t epoch(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_epoch(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

template <typename T, typename F>
SparseVector<T> sparse_from_json(const json& j, F&& convert) {
  SparseVector<T> out;
  for (const auto& [key, value] : j.items()) {
    out[static_cast<PageIndex>(std::stoul(key))] = convert(value);
  }
  return out;
}

}  // namespace

void write_sessions_jsonl(std::ostream& out, const SessionDump& dump) {
  json header;
  header["catalog"]["id"] = hex64(dump.catalog.fingerprint());
  header["catalog"]["pages"] = dump.catalog.pages();
  header["transactions"] = dump.transactions;
  header["sessions"] = dump.sessions.size();
  out << header.dump() << '\n';

  for (const auto& s : dump.sessions) {
    json j;
    j["client_id"] = s.client_id;
    j["identity"] = s.identity ? json(*s.identity) : json(nullptr);
    j["start_time"] = epoch(s.start_time);
    j["history"] = s.history;
    json times = json::array();
    for (auto t : s.visit_times) times.push_back(epoch(t));
    j["visit_times"] = std::move(times);
    json tx = json::object();
    for (auto p : s.transaction_vector) tx[std::to_string(p)] = 1;
    j["transaction_vector"] = std::move(tx);
    j["time_vector"] = sparse_to_json(s.time_vector, [](std::int64_t v) { return v; });
    j["date_vector"] = sparse_to_json(s.date_vector, epoch);
    j["hits_vector"] = sparse_to_json(s.hits_vector, [](std::int64_t v) { return v; });
    j["total_time"] = s.total_time;
    out << j.dump() << '\n';
  }
}

SessionDump read_sessions_jsonl(std::istream& in) {
  SessionDump dump;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  try {
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      const auto j = json::parse(line);
      if (!have_header) {
        dump.catalog = PageCatalog(j.at("catalog").at("pages").get<std::vector<std::string>>());
        if (j.at("catalog").at("id").get<std::string>() != hex64(dump.catalog.fingerprint()))
          throw InputError("catalog id does not match its page list");
        dump.transactions = j.value("transactions", std::int64_t{0});
        have_header = true;
        continue;
      }
      Session s;
      s.client_id = j.at("client_id").get<std::string>();
      if (!j.at("identity").is_null()) s.identity = j.at("identity").get<std::string>();
      s.start_time = from_epoch(j.at("start_time").get<std::int64_t>());
      s.history = j.at("history").get<std::vector<PageIndex>>();
      for (const auto& t : j.at("visit_times")) s.visit_times.push_back(from_epoch(t.get<std::int64_t>()));
      for (const auto& [key, value] : j.at("transaction_vector").items()) {
        if (value.get<int>() != 0) s.transaction_vector.push_back(static_cast<PageIndex>(std::stoul(key)));
      }
      std::sort(s.transaction_vector.begin(), s.transaction_vector.end());
      auto as_int = [](const json& v) { return v.get<std::int64_t>(); };
      s.time_vector = sparse_from_json<std::int64_t>(j.at("time_vector"), as_int);
      s.date_vector = sparse_from_json<Timestamp>(
          j.at("date_vector"), [](const json& v) { return from_epoch(v.get<std::int64_t>()); });
      s.hits_vector = sparse_from_json<std::int64_t>(j.at("hits_vector"), as_int);
      s.total_time = j.at("total_time").get<std::int64_t>();
      s.catalog_size = dump.catalog.size();
      s.catalog_id = dump.catalog.fingerprint();
      if (auto problems = check_session(s); !problems.empty())
        throw InputError("inconsistent session: " + problems.front());
      dump.sessions.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InputError("session dump line " + std::to_string(line_number) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("session dump line " + std::to_string(line_number) + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw InputError("session dump line " + std::to_string(line_number) + ": " + e.what());
  }
  if (in.bad()) throw UnreadableSource("read error in session dump");
  if (!have_header) throw InputError("session dump has no catalog header");
  return dump;
}

SessionDump read_sessions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableSource("cannot open " + path);
  return read_sessions_jsonl(in);
}

}  // namespace antsess
