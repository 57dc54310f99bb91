#include "antsess/log_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "antsess/error.hpp"

namespace antsess {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

constexpr std::uint64_t kFnvPrime = 1099511628211ull;

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

// Cursor over one log line.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_spaces() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  std::optional<std::string_view> token() {
    skip_spaces();
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t') ++pos_;
    if (pos_ == start) return std::nullopt;
    return text_.substr(start, pos_ - start);
  }

  std::optional<std::string_view> bracketed() {
    skip_spaces();
    if (pos_ >= text_.size() || text_[pos_] != '[') return std::nullopt;
    const auto close = text_.find(']', pos_ + 1);
    if (close == std::string_view::npos) return std::nullopt;
    auto inner = text_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    return inner;
  }

  // Double-quoted field; backslash escapes the next character.
  std::optional<std::string> quoted() {
    skip_spaces();
    if (pos_ >= text_.size() || text_[pos_] != '"') return std::nullopt;
    std::string out;
    for (++pos_; pos_ < text_.size(); ++pos_) {
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        out.push_back(text_[++pos_]);
      } else if (c == '"') {
        ++pos_;
        return out;
      } else {
        out.push_back(c);
      }
    }
    return std::nullopt;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string escape_quoted(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

bool fail(std::string* reason, std::string msg) {
  if (reason) *reason = std::move(msg);
  return false;
}

std::optional<Timestamp> civil_to_time(int y, unsigned mo, unsigned d, int hh, int mm,
                                       int ss) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60)
    return std::nullopt;
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

// "2014-03-10T13:55:36Z" or a bare epoch-seconds integer.
std::optional<Timestamp> parse_csv_time(std::string_view text) {
  std::int64_t epoch = 0;
  if (parse_int(text, epoch)) return Timestamp{std::chrono::seconds{epoch}};
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z')
    return std::nullopt;
  int y = 0, hh = 0, mm = 0, ss = 0;
  unsigned mo = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), hh) ||
      !parse_int(text.substr(14, 2), mm) || !parse_int(text.substr(17, 2), ss))
    return std::nullopt;
  return civil_to_time(y, mo, d, hh, mm, ss);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_clf_into(std::string_view line, bool combined, LogRecord& rec,
                    std::string* reason) {
  Scanner sc(line);
  auto host = sc.token();
  if (!host) return fail(reason, "missing host");
  auto ident = sc.token();
  auto authuser = sc.token();
  if (!ident || !authuser) return fail(reason, "missing ident/authuser");
  auto date = sc.bracketed();
  if (!date) return fail(reason, "missing [date]");
  auto ts = parse_clf_time(*date);
  if (!ts) return fail(reason, "bad timestamp");
  auto request = sc.quoted();
  if (!request) return fail(reason, "missing quoted request");
  auto status_tok = sc.token();
  int status = 0;
  if (!status_tok || !parse_int(*status_tok, status) || status < 100 || status > 599)
    return fail(reason, "bad status");
  auto bytes_tok = sc.token();
  std::int64_t bytes = 0;
  if (!bytes_tok || (*bytes_tok != "-" && (!parse_int(*bytes_tok, bytes) || bytes < 0)))
    return fail(reason, "bad byte count");

  // "METHOD URI [PROTOCOL]"
  Scanner rq(*request);
  auto method = rq.token();
  auto uri = rq.token();
  if (!method || !uri) return fail(reason, "bad request line");
  auto resource = normalize_resource(*uri);
  if (resource.empty()) return fail(reason, "empty resource");

  std::optional<std::string> referrer, agent;
  sc.skip_spaces();
  if (!sc.at_end()) {
    referrer = sc.quoted();
    agent = sc.quoted();
    if (!referrer || !agent) return fail(reason, "bad referrer/user-agent");
    sc.skip_spaces();
    if (!sc.at_end()) return fail(reason, "trailing garbage");
  } else if (combined) {
    return fail(reason, "missing referrer/user-agent");
  }

  rec.client_id = std::string(*host);
  rec.identity.reset();
  if (*authuser != "-") rec.identity = std::string(*authuser);
  rec.timestamp = *ts;
  rec.resource = std::move(resource);
  rec.status = status;
  rec.bytes = bytes;
  rec.referrer = std::move(referrer);
  rec.user_agent = std::move(agent);
  return true;
}

bool parse_csv_into(std::string_view line, LogRecord& rec, std::string* reason) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() < 3 || fields.size() > 4)
    return fail(reason, "expected client_id,timestamp,resource[,status]");
  if (fields[0].empty()) return fail(reason, "empty client_id");
  auto ts = parse_csv_time(fields[1]);
  if (!ts) return fail(reason, "bad timestamp");
  auto resource = normalize_resource(fields[2]);
  if (resource.empty()) return fail(reason, "empty resource");
  int status = 200;
  if (fields.size() == 4 && (!parse_int(fields[3], status) || status < 100 || status > 599))
    return fail(reason, "bad status");
  rec = LogRecord{};
  rec.client_id = std::string(fields[0]);
  rec.timestamp = *ts;
  rec.resource = std::move(resource);
  rec.status = status;
  return true;
}

}  // namespace

std::string normalize_resource(std::string_view raw) {
  // Absolute-form request targets carry scheme and authority.
  if (const auto scheme = raw.find("://"); scheme != std::string_view::npos &&
                                           raw.find('/') > scheme) {
    const auto path = raw.find('/', scheme + 3);
    raw = path == std::string_view::npos ? std::string_view("/") : raw.substr(path);
  }
  const auto cut = raw.find_first_of("?#");
  if (cut != std::string_view::npos) raw = raw.substr(0, cut);
  while (raw.size() > 1 && raw.back() == '/') raw.remove_suffix(1);
  std::string out(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<Timestamp> parse_clf_time(std::string_view text) {
  // dd/Mon/yyyy:HH:MM:SS +hhmm
  if (text.size() != 26 || text[2] != '/' || text[6] != '/' || text[11] != ':' ||
      text[14] != ':' || text[17] != ':' || text[20] != ' ')
    return std::nullopt;
  unsigned d = 0;
  int y = 0, hh = 0, mm = 0, ss = 0;
  if (!parse_int(text.substr(0, 2), d) || !parse_int(text.substr(7, 4), y) ||
      !parse_int(text.substr(12, 2), hh) || !parse_int(text.substr(15, 2), mm) ||
      !parse_int(text.substr(18, 2), ss))
    return std::nullopt;
  const auto mon = std::find(kMonths.begin(), kMonths.end(), text.substr(3, 3));
  if (mon == kMonths.end()) return std::nullopt;
  const auto local = civil_to_time(y, static_cast<unsigned>(mon - kMonths.begin()) + 1, d,
                                   hh, mm, ss);
  if (!local) return std::nullopt;

  const char sign = text[21];
  int off_h = 0, off_m = 0;
  if ((sign != '+' && sign != '-') || !parse_int(text.substr(22, 2), off_h) ||
      !parse_int(text.substr(24, 2), off_m) || off_m > 59)
    return std::nullopt;
  const std::chrono::seconds offset{(off_h * 3600 + off_m * 60) * (sign == '-' ? -1 : 1)};
  return *local - offset;
}

std::string format_clf_time(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d +0000",
                static_cast<unsigned>(ymd.day()),
                kMonths[static_cast<unsigned>(ymd.month()) - 1].data(),
                static_cast<int>(ymd.year()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_clf(const LogRecord& r, bool combined) {
  std::string line = r.client_id;
  line += " - ";
  line += r.identity.value_or("-");
  line += " [";
  line += format_clf_time(r.timestamp);
  line += "] \"GET ";
  line += r.resource;
  line += " HTTP/1.1\" ";
  line += std::to_string(r.status);
  line += ' ';
  line += std::to_string(r.bytes);
  if (combined || r.referrer || r.user_agent) {
    line += " \"" + escape_quoted(r.referrer.value_or("-")) + "\" \"" +
            escape_quoted(r.user_agent.value_or("-")) + '"';
  }
  return line;
}

std::optional<LogRecord> parse_line(std::string_view line, LogFormat format,
                                    std::string* reason) {
  LogRecord rec;
  const bool ok = format == LogFormat::CsvTriples
                      ? parse_csv_into(line, rec, reason)
                      : parse_clf_into(line, format == LogFormat::CombinedLogFormat, rec,
                                       reason);
  if (!ok) return std::nullopt;
  return rec;
}

ParseResult parse_log(std::istream& source, LogFormat format) {
  ParseResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) continue;
    if (format == LogFormat::CsvTriples && line_number == 1 &&
        view.substr(0, 10) == "client_id,")
      continue;
    std::string reason;
    if (auto rec = parse_line(view, format, &reason)) {
      result.records.push_back(std::move(*rec));
    } else {
      result.warnings.push_back({line_number, std::move(reason)});
    }
  }
  if (source.bad()) throw UnreadableSource("read error after line " + std::to_string(line_number));
  return result;
}

ParseResult parse_log_file(const std::string& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw UnreadableSource("cannot open " + path);
  return parse_log(in, format);
}

std::optional<LogFormat> log_format_from_string(std::string_view name) {
  if (name == "clf" || name == "common") return LogFormat::CommonLogFormat;
  if (name == "combined") return LogFormat::CombinedLogFormat;
  if (name == "csv") return LogFormat::CsvTriples;
  return std::nullopt;
}

std::string_view to_string(LogFormat format) {
  switch (format) {
    case LogFormat::CommonLogFormat: return "clf";
    case LogFormat::CombinedLogFormat: return "combined";
    case LogFormat::CsvTriples: return "csv";
  }
  return "clf";
}

bool FilterPolicy::accepts(const LogRecord& record) const {
  const bool status_ok =
      std::any_of(accepted_status.begin(), accepted_status.end(), [&](const auto& range) {
        return record.status >= range.first && record.status <= range.second;
      });
  if (!status_ok) return false;
  const std::string_view res = record.resource;
  const auto slash = res.rfind('/');
  const auto leaf = slash == std::string_view::npos ? res : res.substr(slash + 1);
  const auto dot = leaf.rfind('.');
  if (dot == std::string_view::npos) return true;
  const auto ext = leaf.substr(dot);
  return std::none_of(excluded_extensions.begin(), excluded_extensions.end(),
                      [&](const std::string& e) { return ext == e; });
}

std::vector<LogRecord> filter_page_requests(const std::vector<LogRecord>& records,
                                            const FilterPolicy& policy) {
  std::vector<LogRecord> out;
  out.reserve(records.size());
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const LogRecord& r) { return policy.accepts(r); });
  return out;
}

PageCatalog::PageCatalog(std::vector<std::string> pages) {
  for (auto& p : pages) intern(p);
}

std::optional<PageIndex> PageCatalog::find(const std::string& path) const {
  const auto it = index_.find(path);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PageIndex PageCatalog::intern(const std::string& path) {
  if (auto it = index_.find(path); it != index_.end()) return it->second;
  const auto k = static_cast<PageIndex>(pages_.size());
  pages_.push_back(path);
  index_.emplace(path, k);
  for (unsigned char c : path) fingerprint_ = (fingerprint_ ^ c) * kFnvPrime;
  fingerprint_ = (fingerprint_ ^ '\n') * kFnvPrime;
  return k;
}

PageCatalog build_catalog(const std::vector<LogRecord>& records) {
  PageCatalog catalog;
  for (const auto& r : records) catalog.intern(r.resource);
  return catalog;
}

void write_records_jsonl(std::ostream& out, const std::vector<LogRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["client_id"] = r.client_id;
    j["identity"] = r.identity ? nlohmann::ordered_json(*r.identity) : nullptr;
    j["timestamp"] = r.timestamp.time_since_epoch().count();
    j["resource"] = r.resource;
    j["status"] = r.status;
    j["bytes"] = r.bytes;
    j["referrer"] = r.referrer ? nlohmann::ordered_json(*r.referrer) : nullptr;
    j["user_agent"] = r.user_agent ? nlohmann::ordered_json(*r.user_agent) : nullptr;
    out << j.dump() << '\n';
  }
}

}  // namespace antsess
