#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "antsess/antclust.hpp"
#include "antsess/log_ingest.hpp"
#include "antsess/report.hpp"
#include "antsess/sessionizer.hpp"
#include "antsess/similarity.hpp"

namespace antsess {

inline constexpr const char* kVersion = "1.0.0";

// Fully resolved settings of one invocation. Every field has a default; a
// config with a single input path is complete.
struct RunConfig {
  std::vector<std::string> inputs;
  std::optional<std::string> from_sessions;

  LogFormat format = LogFormat::CommonLogFormat;
  FilterPolicy filter{};
  std::chrono::seconds timeout = kDefaultSessionTimeout;

  SimilarityMeasure measure{};
  antclust::Config clustering{};  // clustering.rng_seed is the base seed

  report::TableFormat report_format = report::TableFormat::Text;
  std::size_t repeats = 3;
  unsigned threads = 1;
  bool timings = true;

  std::optional<std::string> out;
  std::optional<std::string> assignment_csv;
  std::optional<std::string> assignment_json;
  std::optional<std::string> dump_records;
  std::optional<std::string> dump_sessions;

  // Throws ConfigError naming the offending field.
  void validate() const;

  // Settings that influence results; thread count and output paths are
  // left out so that they cannot change report bytes.
  nlohmann::ordered_json to_json() const;
};

// Seed of repeat r.
inline std::uint64_t repeat_seed(std::uint64_t base, std::size_t r) { return base + r; }

struct Dataset {
  std::string source;
  SessionDump sessions;
  std::size_t malformed_lines = 0;
  PhaseTimings timings{};
};

struct DatasetResult {
  Dataset dataset;
  std::vector<report::ClusterReport> runs;
  antclust::ClusterAssignment assignment;  // of the first repeat
};

// parse -> filter -> catalog -> sessionize. Malformed-line warnings go to
// `warnings` when given.
Dataset load_log(const std::string& path, const RunConfig& cfg, std::ostream* warnings = nullptr);
Dataset load_session_dump(const std::string& path);

DatasetResult cluster_dataset(Dataset dataset, const RunConfig& cfg);

std::string render_report(const std::vector<DatasetResult>& results, const RunConfig& cfg);
std::string assignment_to_csv(const antclust::ClusterAssignment& assignment);
std::string assignment_to_json(const antclust::ClusterAssignment& assignment);

}  // namespace antsess
