// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "antsess/log_ingest.hpp"
#include "antsess/sessionizer.hpp"

namespace antsess::testing {

inline LogRecord rec(std::string client, std::int64_t t, std::string resource, int status = 200) {
  LogRecord r;
  r.client_id = std::move(client);
  r.timestamp = Timestamp{std::chrono::seconds{t}};
  r.resource = std::move(resource);
  r.status = status;
  return r;
}

// A consistent session visiting `pages` once each, ten seconds apart.
inline Session session_over(std::vector<PageIndex> pages, std::size_t catalog_size = 64,
                            std::uint64_t catalog_id = 1) {
  Session s;
  s.client_id = "10.0.0.1";
  s.catalog_size = catalog_size;
  s.catalog_id = catalog_id;
  std::int64_t t = 0;
  for (auto p : pages) {
    s.history.push_back(p);
    s.visit_times.push_back(Timestamp{std::chrono::seconds{t}});
    s.hits_vector[p] += 1;
    s.date_vector.try_emplace(p, Timestamp{std::chrono::seconds{t}});
    s.time_vector[p] += 10;
    s.total_time += 10;
    t += 10;
  }
  for (const auto& [p, h] : s.hits_vector) s.transaction_vector.push_back(p);
  if (!s.visit_times.empty()) s.start_time = s.visit_times.front();
  return s;
}

inline std::filesystem::path scratch_dir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("antsess_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

inline std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Rand index adjusted for chance, by counting agreeing item pairs directly.
inline double pair_counting_ari(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t n = a.size();
  double both = 0, in_a = 0, in_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2;
  const double expected = in_a * in_b / pairs;
  const double max_index = (in_a + in_b) / 2;
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

// Expected per-visit dwell times for a sorted visit list, written from the
// rule text: gap to next request with a 1 s floor; the last visit gets the
// mean of the others rounded to the nearest second (1 s when alone).
inline std::vector<std::int64_t> dwell_oracle(const std::vector<std::int64_t>& times) {
  std::vector<std::int64_t> d;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    auto g = times[k + 1] - times[k];
    d.push_back(g == 0 ? 1 : g);
  }
  if (d.empty()) {
    d.push_back(1);
  } else {
    long double mean = 0;
    for (auto x : d) mean += x;
    mean /= d.size();
    d.push_back(static_cast<std::int64_t>(std::floor(mean + 0.5L)));
  }
  return d;
}

}  // namespace antsess::testing
