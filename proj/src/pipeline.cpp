#include "antsess/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "antsess/error.hpp"

namespace antsess {

using json = nlohmann::ordered_json;

void RunConfig::validate() const {
  clustering.validate();
  measure.validate();
  if (timeout.count() <= 0) throw ConfigError("timeout must be a positive number of seconds");
  if (repeats == 0) throw ConfigError("repeats must be at least 1");
  if (inputs.empty() && !from_sessions) throw ConfigError("no input given");
  if (!inputs.empty() && from_sessions)
    throw ConfigError("--input and --from-sessions are mutually exclusive");
  const bool single = inputs.size() + (from_sessions ? 1 : 0) == 1;
  if (!single && (assignment_csv || assignment_json || dump_records || dump_sessions))
    throw ConfigError("assignment and dump files need exactly one input");
  if (from_sessions && (dump_records || dump_sessions))
    throw ConfigError("dumps are not available when starting from sessions");
}

json RunConfig::to_json() const {
  json j;
  j["inputs"] = inputs;
  j["from_sessions"] = from_sessions ? json(*from_sessions) : json(nullptr);
  j["format"] = std::string(to_string(format));
  j["filter"]["excluded_extensions"] = filter.excluded_extensions;
  json statuses = json::array();
  for (const auto& [lo, hi] : filter.accepted_status) statuses.push_back({lo, hi});
  j["filter"]["accepted_status"] = std::move(statuses);
  j["timeout_seconds"] = timeout.count();
  j["similarity"] = std::string(to_string(measure.kind));
  j["blend_weights"] = {measure.weights.tx, measure.weights.time, measure.weights.hits};
  j["iter_multiplier"] = clustering.iter_multiplier;
  j["init_meetings"] = clustering.init_meetings;
  j["min_nest_fraction"] = clustering.min_nest_fraction;
  j["seed"] = clustering.rng_seed;
  j["repeats"] = repeats;
  return j;
}

Dataset load_log(const std::string& path, const RunConfig& cfg, std::ostream* warnings) {
  Dataset ds;
  ds.source = path;
  Stopwatch watch;
  auto parsed = parse_log_file(path, cfg.format);
  ds.malformed_lines = parsed.warnings.size();
  if (warnings) {
    for (const auto& w : parsed.warnings)
      *warnings << path << ':' << w.line_number << ": malformed line skipped (" << w.reason
                << ")\n";
  }
  auto pages = filter_page_requests(parsed.records, cfg.filter);
  ds.sessions.transactions = static_cast<std::int64_t>(parsed.records.size());
  parsed.records.clear();
  ds.sessions.catalog = build_catalog(pages);
  ds.timings.parse = watch.lap();

  if (cfg.dump_records) {
    std::ofstream out(*cfg.dump_records);
    if (!out) throw UnreadableSource("cannot write " + *cfg.dump_records);
    write_records_jsonl(out, pages);
  }

  watch.lap();
  ds.sessions.sessions = sessionize(pages, ds.sessions.catalog, cfg.timeout);
  ds.timings.sessionize = watch.lap();

  if (cfg.dump_sessions) {
    std::ofstream out(*cfg.dump_sessions);
    if (!out) throw UnreadableSource("cannot write " + *cfg.dump_sessions);
    write_sessions_jsonl(out, ds.sessions);
  }
  return ds;
}

Dataset load_session_dump(const std::string& path) {
  Dataset ds;
  ds.source = path;
  Stopwatch watch;
  ds.sessions = read_sessions_file(path);
  ds.timings.parse = watch.seconds();
  return ds;
}

DatasetResult cluster_dataset(Dataset dataset, const RunConfig& cfg) {
  const auto& sessions = dataset.sessions.sessions;
  if (sessions.empty()) throw EmptyInput(dataset.source + ": no sessions to cluster");

  DatasetResult result;
  Stopwatch watch;
  const auto sims = SimilarityMatrix::compute(sessions, cfg.measure, cfg.threads);
  const double similarity_seconds = watch.seconds();

  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    auto ccfg = cfg.clustering;
    ccfg.rng_seed = repeat_seed(cfg.clustering.rng_seed, r);
    report::RunMeta meta;
    meta.transactions = dataset.sessions.transactions;
    meta.seed = ccfg.rng_seed;
    meta.timings = dataset.timings;
    meta.timings.similarity = similarity_seconds;
    auto assignment = antclust::run(sims, ccfg, &meta.timings);
    result.runs.push_back(report::summarize(assignment, meta));
    if (r == 0) result.assignment = std::move(assignment);
  }
  result.dataset = std::move(dataset);
  return result;
}

std::string render_report(const std::vector<DatasetResult>& results, const RunConfig& cfg) {
  std::vector<report::ClusterReport> all_runs;
  for (const auto& res : results) all_runs.insert(all_runs.end(), res.runs.begin(), res.runs.end());

  switch (cfg.report_format) {
    case report::TableFormat::Csv:
      return report::emit_table(all_runs, report::TableFormat::Csv, cfg.timings);
    case report::TableFormat::Json: {
      json doc;
      doc["tool"] = "antsess";
      doc["version"] = kVersion;
      doc["config"] = cfg.to_json();
      json datasets = json::array();
      for (const auto& res : results) {
        json d;
        d["source"] = res.dataset.source;
        d["transactions"] = res.dataset.sessions.transactions;
        d["malformed_lines"] = res.dataset.malformed_lines;
        d["catalog_pages"] = res.dataset.sessions.catalog.size();
        json runs = json::array();
        for (const auto& r : res.runs) runs.push_back(report::to_json(r, cfg.timings));
        d["runs"] = std::move(runs);
        d["average"] = report::to_json(report::average(res.runs), cfg.timings);
        datasets.push_back(std::move(d));
      }
      doc["datasets"] = std::move(datasets);
      return doc.dump(2) + "\n";
    }
    case report::TableFormat::Text:
      break;
  }

  std::ostringstream out;
  out << report::emit_table(all_runs, report::TableFormat::Text, cfg.timings);
  for (const auto& res : results) {
    const auto avg = report::average(res.runs);
    char numbers[160];
    std::snprintf(numbers, sizeof numbers,
                  "transactions=%lld sessions=%.2f clusters=%.2f dominating_share=%.4f\n",
                  static_cast<long long>(avg.transactions), avg.sessions, avg.clusters,
                  avg.dominating_share);
    out << "mean of " << avg.runs << " run(s) for " << res.dataset.source << ": " << numbers;
  }
  return out.str();
}

std::string assignment_to_csv(const antclust::ClusterAssignment& assignment) {
  std::string out = "session_index,cluster_label\n";
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(assignment.labels[i]);
    out += '\n';
  }
  return out;
}

std::string assignment_to_json(const antclust::ClusterAssignment& assignment) {
  json j;
  j["clusters"] = assignment.cluster_count();
  j["labels"] = assignment.labels;
  return j.dump() + "\n";
}

}  // namespace antsess
