#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace antsess::synth {

// Generator parameters. Every session belongs to one user, every user to
// one profile, and a profile is a page subset the user browses.
struct TrafficModel {
  std::size_t site_pages = 50;
  std::size_t profiles = 10;
  std::size_t pages_per_profile = 5;
  bool disjoint_profiles = true;
  std::size_t users_per_profile = 20;

  // Planted session count for a log of T lines is
  // round(sessions_intercept + sessions_per_transaction * T), a line fitted
  // to a reference transactions/sessions table (5k..50k lines -> 129..917
  // sessions) by least squares on relative error. `session_count` overrides it.
  double sessions_intercept = 42.186;
  double sessions_per_transaction = 0.0178819531;
  std::optional<std::size_t> session_count;

  // Session lengths are uniform in mean * [1 - spread, 1 + spread].
  double length_spread = 0.5;

  std::chrono::seconds timeout{1800};
  // Gaps inside a session, seconds. Each profile draws its own upper bound
  // in [max_intra_gap / 2, max_intra_gap].
  std::int64_t min_intra_gap = 0;
  std::int64_t max_intra_gap = 120;
  // Gap between consecutive sessions of one user is timeout + extra.
  std::int64_t min_inter_extra = 1;
  std::int64_t max_inter_extra = 7200;

  // Fraction of emitted lines that are static-asset requests.
  double asset_fraction = 0.0;

  std::uint64_t seed = 1;

  // Throws InfeasibleModel / ConfigError.
  void validate() const;
};

std::size_t planted_session_count(const TrafficModel& model, std::size_t transactions);

struct GroundTruth {
  std::vector<std::size_t> record_session;  // per emitted line
  std::vector<bool> record_is_page;         // false for asset requests
  std::vector<std::size_t> session_profile;
  std::vector<std::string> session_client;
  std::vector<std::vector<std::size_t>> profile_pages;  // site page numbers
  std::vector<std::string> emitted_pages;               // distinct page paths, sorted

  std::size_t session_count() const { return session_profile.size(); }
};

struct SynthLog {
  std::string text;  // CLF, one line per record, time-ordered
  GroundTruth truth;
  std::size_t lines = 0;
};

// Planted sessions are numbered by (start time, client), matching the order
// in which sessionize() returns them.
SynthLog generate(const TrafficModel& model, std::size_t target_transactions);

std::string page_path(std::size_t page);

void write_truth_json(std::ostream& out, const GroundTruth& truth);

}  // namespace antsess::synth
