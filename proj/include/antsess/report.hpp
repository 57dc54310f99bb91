#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "antsess/antclust.hpp"
#include "antsess/timing.hpp"

namespace antsess::report {

struct RunMeta {
  std::int64_t transactions = 0;
  std::uint64_t seed = 0;
  PhaseTimings timings{};
};

struct ClusterReport {
  std::int64_t transactions = 0;
  std::size_t sessions = 0;
  std::size_t clusters = 0;
  std::vector<std::size_t> cluster_sizes;  // descending
  double dominating_share = 0.0;           // share of sessions in the 4 largest clusters
  std::uint64_t seed = 0;
  PhaseTimings timings{};
};

inline constexpr std::size_t kDominatingClusters = 4;

// Throws std::invalid_argument on an empty assignment.
ClusterReport summarize(const antclust::ClusterAssignment& assignment, const RunMeta& meta);

struct AverageRow {
  std::int64_t transactions = 0;
  double sessions = 0;
  double clusters = 0;
  double dominating_share = 0;
  double total_seconds = 0;
  std::size_t runs = 0;
};

AverageRow average(std::span<const ClusterReport> reports);

enum class TableFormat { Text, Csv, Json };
std::optional<TableFormat> table_format_from_string(std::string_view name);

// Rows sorted by transactions ascending. Timings are printed as 0 when
// `with_timings` is false so that output is reproducible byte for byte.
std::string emit_table(std::vector<ClusterReport> reports, TableFormat format,
                       bool with_timings = true);

nlohmann::ordered_json to_json(const ClusterReport& report, bool with_timings = true);
nlohmann::ordered_json to_json(const AverageRow& row, bool with_timings = true);

// Chance-corrected agreement between two labelings of the same items,
// computed from their contingency table.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace antsess::report
