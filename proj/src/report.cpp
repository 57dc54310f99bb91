#include "antsess/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace antsess::report {

using json = nlohmann::ordered_json;

ClusterReport summarize(const antclust::ClusterAssignment& assignment, const RunMeta& meta) {
  if (assignment.labels.empty()) throw std::invalid_argument("summarize: empty assignment");
  std::map<antclust::Label, std::size_t> counts;
  for (auto l : assignment.labels) ++counts[l];

  ClusterReport r;
  r.transactions = meta.transactions;
  r.seed = meta.seed;
  r.timings = meta.timings;
  r.sessions = assignment.labels.size();
  r.clusters = counts.size();
  for (const auto& [label, n] : counts) r.cluster_sizes.push_back(n);
  std::sort(r.cluster_sizes.begin(), r.cluster_sizes.end(), std::greater<>());
  std::size_t top = 0;
  for (std::size_t k = 0; k < std::min(kDominatingClusters, r.cluster_sizes.size()); ++k)
    top += r.cluster_sizes[k];
  r.dominating_share = static_cast<double>(top) / static_cast<double>(r.sessions);
  return r;
}

AverageRow average(std::span<const ClusterReport> reports) {
  AverageRow row;
  row.runs = reports.size();
  if (reports.empty()) return row;
  row.transactions = reports.front().transactions;
  for (const auto& r : reports) {
    row.sessions += static_cast<double>(r.sessions);
    row.clusters += static_cast<double>(r.clusters);
    row.dominating_share += r.dominating_share;
    row.total_seconds += r.timings.total();
  }
  const auto n = static_cast<double>(reports.size());
  row.sessions /= n;
  row.clusters /= n;
  row.dominating_share /= n;
  row.total_seconds /= n;
  return row;
}

std::optional<TableFormat> table_format_from_string(std::string_view name) {
  if (name == "text") return TableFormat::Text;
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  return std::nullopt;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Millisecond precision.
double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

json timings_json(const PhaseTimings& t) {
  json j;
  j["parse"] = round_ms(t.parse);
  j["sessionize"] = round_ms(t.sessionize);
  j["similarity"] = round_ms(t.similarity);
  j["init"] = round_ms(t.init);
  j["simulate"] = round_ms(t.simulate);
  j["assign"] = round_ms(t.assign);
  j["total"] = round_ms(t.total());
  return j;
}

}  // namespace

json to_json(const ClusterReport& r, bool with_timings) {
  json j;
  j["transactions"] = r.transactions;
  j["sessions"] = r.sessions;
  j["clusters"] = r.clusters;
  j["cluster_sizes"] = r.cluster_sizes;
  j["dominating_share"] = r.dominating_share;
  j["seed"] = r.seed;
  j["timings"] = timings_json(with_timings ? r.timings : PhaseTimings{});
  return j;
}

json to_json(const AverageRow& row, bool with_timings) {
  json j;
  j["transactions"] = row.transactions;
  j["runs"] = row.runs;
  j["sessions"] = row.sessions;
  j["clusters"] = row.clusters;
  j["dominating_share"] = row.dominating_share;
  j["total_seconds"] = with_timings ? round_ms(row.total_seconds) : 0.0;
  return j;
}

std::string emit_table(std::vector<ClusterReport> reports, TableFormat format,
                       bool with_timings) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const ClusterReport& a, const ClusterReport& b) {
                     return a.transactions < b.transactions;
                   });
  auto seconds = [&](const ClusterReport& r) { return with_timings ? r.timings.total() : 0.0; };

  if (format == TableFormat::Json) {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(to_json(r, with_timings));
    return rows.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"transactions", "sessions", "clusters", "dominating_share", "total_seconds"});
  for (const auto& r : reports) {
    cells.push_back({std::to_string(r.transactions), std::to_string(r.sessions),
                     std::to_string(r.clusters), fixed(r.dominating_share, 4),
                     fixed(seconds(r), 3)});
  }

  std::string out;
  if (format == TableFormat::Csv) {
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += row[c];
      }
      out += '\n';
    }
    return out;
  }

  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += std::string(width[c] - row[c].size(), ' ');
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: size mismatch");
  const auto n = a.size();
  if (n < 2) return 1.0;

  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t k = 0; k < n; ++k) {
    cells[{a[k], b[k]}] += 1;
    rows[a[k]] += 1;
    cols[b[k]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double sum_cells = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, c] : cells) sum_cells += pairs(c);
  for (const auto& [key, c] : rows) sum_rows += pairs(c);
  for (const auto& [key, c] : cols) sum_cols += pairs(c);

  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = (sum_rows + sum_cols) / 2;
  if (max_index == expected) return 1.0;  // both labelings trivial
  return (sum_cells - expected) / (max_index - expected);
}

}  // namespace antsess::report
