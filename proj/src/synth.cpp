#include "antsess/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "antsess/error.hpp"
#include "antsess/log_ingest.hpp"
#include "antsess/random.hpp"

namespace antsess::synth {

namespace {

// 2014-03-10T00:00:00Z
constexpr std::int64_t kBaseEpoch = 1394409600;
constexpr std::int64_t kDay = 86400;

constexpr const char* kAssets[] = {"/static/logo.png", "/static/site.css", "/static/app.js",
                                   "/static/banner.jpg", "/favicon.ico", "/static/bg.gif"};

struct Event {
  std::int64_t time;
  std::size_t session;  // provisional id
  std::size_t seq;      // position within the session's event list
  std::string path;
  bool is_page;
};

std::string client_address(std::size_t user) {
  const auto u = user + 1;
  char buf[32];
  std::snprintf(buf, sizeof buf, "10.%zu.%zu.%zu", (u >> 16) & 0xff, (u >> 8) & 0xff, u & 0xff);
  return buf;
}

std::vector<std::vector<std::size_t>> build_profiles(const TrafficModel& m, Rng& rng) {
  std::vector<std::size_t> site(m.site_pages);
  std::iota(site.begin(), site.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> profiles(m.profiles);
  if (m.disjoint_profiles) {
    for (std::size_t p = 0; p < m.profiles; ++p) {
      profiles[p].assign(site.begin() + static_cast<std::ptrdiff_t>(p * m.pages_per_profile),
                         site.begin() + static_cast<std::ptrdiff_t>((p + 1) * m.pages_per_profile));
    }
    return profiles;
  }
  for (auto& prof : profiles) {
    // Partial Fisher-Yates over the site map.
    auto pool = site;
    for (std::size_t k = 0; k < m.pages_per_profile; ++k) {
      const auto pick = k + rng.uniform_index(pool.size() - k);
      std::swap(pool[k], pool[pick]);
      prof.push_back(pool[k]);
    }
    std::sort(prof.begin(), prof.end());
  }
  return profiles;
}

}  // namespace

void TrafficModel::validate() const {
  if (site_pages == 0 || profiles == 0 || pages_per_profile == 0 || users_per_profile == 0)
    throw ConfigError("traffic model sizes must be positive");
  if (pages_per_profile > site_pages)
    throw InfeasibleModel("pages_per_profile exceeds site_pages");
  if (disjoint_profiles && profiles * pages_per_profile > site_pages)
    throw InfeasibleModel("cannot carve " + std::to_string(profiles) + " disjoint profiles of " +
                          std::to_string(pages_per_profile) + " pages from " +
                          std::to_string(site_pages) + " pages");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (min_intra_gap < 0 || max_intra_gap < min_intra_gap || max_intra_gap >= timeout.count())
    throw ConfigError("intra-session gaps must satisfy 0 <= min <= max < timeout");
  if (min_inter_extra < 1 || max_inter_extra < min_inter_extra)
    throw ConfigError("inter-session gap must exceed the timeout");
  if (!(asset_fraction >= 0.0 && asset_fraction < 1.0))
    throw ConfigError("asset_fraction must be in [0, 1)");
  if (!(length_spread >= 0.0 && length_spread < 1.0))
    throw ConfigError("length_spread must be in [0, 1)");
  if (session_count && *session_count == 0) throw ConfigError("session_count must be positive");
}

std::size_t planted_session_count(const TrafficModel& m, std::size_t transactions) {
  if (m.session_count) return *m.session_count;
  const double s = m.sessions_intercept + m.sessions_per_transaction * static_cast<double>(transactions);
  return static_cast<std::size_t>(std::max(1.0, std::round(s)));
}

std::string page_path(std::size_t page) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "/pages/page%02zu.html", page);
  return buf;
}

SynthLog generate(const TrafficModel& m, std::size_t target) {
  m.validate();
  if (target == 0) throw ConfigError("target transaction count must be positive");
  Rng rng(m.seed);

  const auto assets = static_cast<std::size_t>(std::llround(m.asset_fraction * static_cast<double>(target)));
  const std::size_t page_lines = target - assets;
  if (page_lines == 0) throw ConfigError("no page requests left after assets");
  const std::size_t sessions = std::min(planted_session_count(m, target), page_lines);

  const auto profiles = build_profiles(m, rng);
  std::vector<std::int64_t> profile_gap(m.profiles);
  for (auto& g : profile_gap)
    g = rng.uniform_int(std::max(m.min_intra_gap, m.max_intra_gap / 2), m.max_intra_gap);

  // Session lengths: uniform around the mean, then nudged to hit the target.
  const double mean = static_cast<double>(page_lines) / static_cast<double>(sessions);
  std::vector<std::size_t> length(sessions);
  std::size_t total = 0;
  for (auto& l : length) {
    const double f = 1.0 + m.length_spread * (2.0 * rng.uniform01() - 1.0);
    l = static_cast<std::size_t>(std::max(1.0, std::round(mean * f)));
    total += l;
  }
  while (total < page_lines) {
    ++length[rng.uniform_index(sessions)];
    ++total;
  }
  while (total > page_lines) {
    auto& l = length[rng.uniform_index(sessions)];
    if (l > 1) {
      --l;
      --total;
    }
  }

  const std::size_t users = m.profiles * m.users_per_profile;
  std::vector<std::size_t> session_user(sessions);
  for (auto& u : session_user) u = rng.uniform_index(users);

  // Lay each user's sessions out back to back.
  std::vector<std::int64_t> user_clock(users);
  for (auto& c : user_clock) c = kBaseEpoch + rng.uniform_int(0, kDay - 1);
  std::vector<bool> user_started(users, false);

  std::vector<Event> events;
  events.reserve(target);
  std::vector<std::int64_t> session_start(sessions);
  std::vector<std::size_t> page_event_index;
  page_event_index.reserve(page_lines);
  for (std::size_t s = 0; s < sessions; ++s) {
    const auto user = session_user[s];
    const auto profile = user / m.users_per_profile;
    const auto& pages = profiles[profile];
    auto& clock = user_clock[user];
    if (user_started[user]) clock += m.timeout.count() + rng.uniform_int(m.min_inter_extra, m.max_inter_extra);
    user_started[user] = true;
    session_start[s] = clock;
    for (std::size_t k = 0; k < length[s]; ++k) {
      if (k > 0) clock += rng.uniform_int(m.min_intra_gap, profile_gap[profile]);
      const auto page = pages[rng.uniform_index(pages.size())];
      page_event_index.push_back(events.size());
      events.push_back({clock, s, k, page_path(page), true});
    }
  }
  for (std::size_t a = 0; a < assets; ++a) {
    const auto& parent = events[page_event_index[rng.uniform_index(page_event_index.size())]];
    events.push_back({parent.time, parent.session, length[parent.session] + a,
                      kAssets[rng.uniform_index(std::size(kAssets))], false});
  }

  // Renumber sessions by (start, client) so they line up with sessionize().
  std::vector<std::size_t> order(sessions);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::string> client(sessions);
  for (std::size_t s = 0; s < sessions; ++s) client[s] = client_address(session_user[s]);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(session_start[a], client[a]) < std::tie(session_start[b], client[b]);
  });
  std::vector<std::size_t> final_id(sessions);
  for (std::size_t k = 0; k < sessions; ++k) final_id[order[k]] = k;

  std::sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
    return std::tie(a.time, final_id[a.session], a.seq) <
           std::tie(b.time, final_id[b.session], b.seq);
  });

  SynthLog out;
  out.truth.profile_pages = profiles;
  out.truth.session_profile.resize(sessions);
  out.truth.session_client.resize(sessions);
  for (std::size_t s = 0; s < sessions; ++s) {
    out.truth.session_profile[final_id[s]] = session_user[s] / m.users_per_profile;
    out.truth.session_client[final_id[s]] = client[s];
  }
  std::set<std::string> emitted;
  LogRecord rec;
  for (const auto& e : events) {
    rec.client_id = client[e.session];
    rec.timestamp = Timestamp{std::chrono::seconds{e.time}};
    rec.resource = e.path;
    rec.status = 200;
    rec.bytes = static_cast<std::int64_t>(512 + 16 * e.path.size());
    out.text += format_clf(rec);
    out.text += '\n';
    out.truth.record_session.push_back(final_id[e.session]);
    out.truth.record_is_page.push_back(e.is_page);
    if (e.is_page) emitted.insert(e.path);
  }
  out.truth.emitted_pages.assign(emitted.begin(), emitted.end());
  out.lines = events.size();
  return out;
}

void write_truth_json(std::ostream& out, const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["sessions"] = truth.session_count();
  j["record_session"] = truth.record_session;
  j["record_is_page"] = truth.record_is_page;
  j["session_profile"] = truth.session_profile;
  j["session_client"] = truth.session_client;
  j["profile_pages"] = truth.profile_pages;
  j["emitted_pages"] = truth.emitted_pages;
  out << j.dump() << '\n';
}

}  // namespace antsess::synth
