#include "antsess/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "antsess/error.hpp"
#include "antsess/pipeline.hpp"
#include "antsess/synth.hpp"

namespace antsess::cli {

namespace {

// Raw flag values before conversion into RunConfig.
struct Flags {
  std::vector<std::string> inputs;
  std::string from_sessions;
  std::string format = "clf";
  std::string exclude_ext;
  std::string accept_status;
  long long timeout = kDefaultSessionTimeout.count();
  std::string similarity = "cosine";
  std::string blend_weights;
  std::uint32_t iter_multiplier = 75;
  std::uint32_t init_meetings = 30;
  double min_nest_fraction = 0.05;
  std::uint64_t seed = 0;
  std::string report = "text";
  std::size_t repeats = 3;
  unsigned threads = 0;
  bool no_timings = false;
  std::string out;
  std::string assignment_csv;
  std::string assignment_json;
  std::string dump_records;
  std::string dump_sessions;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + ": not a number: " + s);
  }
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + ": not an integer: " + s);
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  cfg.inputs = f.inputs;
  if (!f.from_sessions.empty()) cfg.from_sessions = f.from_sessions;

  const auto format = log_format_from_string(f.format);
  if (!format) throw ConfigError("format must be one of clf, combined, csv");
  cfg.format = *format;

  if (!f.exclude_ext.empty()) {
    cfg.filter.excluded_extensions.clear();
    for (auto ext : split(f.exclude_ext, ',')) {
      if (ext.front() != '.') ext.insert(ext.begin(), '.');
      cfg.filter.excluded_extensions.push_back(ext);
    }
  }
  if (!f.accept_status.empty()) {
    cfg.filter.accepted_status.clear();
    for (const auto& item : split(f.accept_status, ',')) {
      const auto dash = item.find('-');
      const int lo = to_int(item.substr(0, dash), "accept-status");
      const int hi = dash == std::string::npos ? lo : to_int(item.substr(dash + 1), "accept-status");
      if (lo > hi) throw ConfigError("accept-status: empty range " + item);
      cfg.filter.accepted_status.emplace_back(lo, hi);
    }
  }

  cfg.timeout = std::chrono::seconds{f.timeout};

  const auto kind = similarity_kind_from_string(f.similarity);
  if (!kind) throw ConfigError("similarity must be one of cosine, jaccard, blend");
  cfg.measure.kind = *kind;
  if (!f.blend_weights.empty()) {
    const auto parts = split(f.blend_weights, ',');
    if (parts.size() != 3) throw ConfigError("blend-weights takes w_tx,w_time,w_hits");
    cfg.measure.weights = {to_double(parts[0], "blend-weights"),
                           to_double(parts[1], "blend-weights"),
                           to_double(parts[2], "blend-weights")};
  } else if (cfg.measure.kind == SimilarityKind::Blend) {
    cfg.measure.weights = {0.5, 0.25, 0.25};
  }

  cfg.clustering.iter_multiplier = f.iter_multiplier;
  cfg.clustering.init_meetings = f.init_meetings;
  cfg.clustering.min_nest_fraction = f.min_nest_fraction;
  cfg.clustering.rng_seed = f.seed;

  const auto report = report::table_format_from_string(f.report);
  if (!report) throw ConfigError("report must be one of text, csv, json");
  cfg.report_format = *report;
  cfg.repeats = f.repeats;
  cfg.threads = f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency());
  cfg.timings = !f.no_timings;

  auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional(s); };
  cfg.out = opt(f.out);
  cfg.assignment_csv = opt(f.assignment_csv);
  cfg.assignment_json = opt(f.assignment_json);
  cfg.dump_records = opt(f.dump_records);
  cfg.dump_sessions = opt(f.dump_sessions);
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw UnreadableSource("cannot write " + path);
}

void add_ingest_options(CLI::App& app, Flags& f) {
  app.add_option("--format", f.format, "Log format: clf, combined or csv")->capture_default_str();
  app.add_option("--exclude-ext", f.exclude_ext,
                 "Comma-separated extensions treated as non-page requests");
  app.add_option("--accept-status", f.accept_status,
                 "Comma-separated accepted statuses or ranges, e.g. 200-299,304");
  app.add_option("--timeout", f.timeout, "Session timeout in seconds")->capture_default_str();
  app.add_option("--dump-records", f.dump_records, "Write filtered records as JSON lines");
  app.add_option("--dump-sessions", f.dump_sessions, "Write sessions as JSON lines");
}

void add_cluster_options(CLI::App& app, Flags& f) {
  app.add_option("--similarity", f.similarity, "cosine, jaccard or blend")->capture_default_str();
  app.add_option("--blend-weights", f.blend_weights, "w_tx,w_time,w_hits for blend");
  app.add_option("--iter-multiplier", f.iter_multiplier, "Meetings per ant")->capture_default_str();
  app.add_option("--init-meetings", f.init_meetings, "Template-learning meetings per ant")
      ->capture_default_str();
  app.add_option("--min-nest-fraction", f.min_nest_fraction,
                 "Nests smaller than this fraction of the ants are dissolved")
      ->capture_default_str();
  app.add_option("--seed", f.seed, "Base random seed")->capture_default_str();
  app.add_option("--repeats", f.repeats, "Runs to average, seeds seed..seed+R-1")
      ->capture_default_str();
  app.add_option("--report", f.report, "text, csv or json")->capture_default_str();
  app.add_option("--out", f.out, "Write the report here instead of stdout");
  app.add_option("--assignment", f.assignment_csv, "Write session_index,cluster_label CSV");
  app.add_option("--assignment-json", f.assignment_json, "Write the assignment as JSON");
  app.add_flag("--no-timings", f.no_timings, "Report all timings as 0");
}

int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err, std::string& stage) {
  std::vector<DatasetResult> results;
  if (cfg.from_sessions) {
    stage = "load-sessions";
    auto ds = load_session_dump(*cfg.from_sessions);
    stage = "cluster";
    results.push_back(cluster_dataset(std::move(ds), cfg));
  } else {
    for (const auto& path : cfg.inputs) {
      stage = "parse";
      auto ds = load_log(path, cfg, &err);
      stage = "cluster";
      results.push_back(cluster_dataset(std::move(ds), cfg));
    }
  }

  stage = "report";
  const auto rendered = render_report(results, cfg);
  if (cfg.out) {
    write_file(*cfg.out, rendered);
  } else {
    out << rendered;
  }
  if (cfg.assignment_csv) write_file(*cfg.assignment_csv, assignment_to_csv(results.front().assignment));
  if (cfg.assignment_json) write_file(*cfg.assignment_json, assignment_to_json(results.front().assignment));
  return kOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Web session clustering with artificial ants", "antsess"};
  app.set_version_flag("--version", std::string("antsess ") + kVersion);
  app.require_subcommand(1);

  Flags f;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Parse, sessionize, cluster and report");
  run->add_option("--input", f.inputs, "Access log; repeat for independent datasets");
  run->add_option("--from-sessions", f.from_sessions, "Start from a session dump");
  add_ingest_options(*run, f);
  add_cluster_options(*run, f);
  run->add_option("--threads", threads, "Worker threads for similarity (0 = all cores)");

  auto* sess = app.add_subcommand("sessionize", "Parse and sessionize, then stop");
  sess->add_option("--input", f.inputs, "Access log")->required();
  add_ingest_options(*sess, f);

  auto* cluster = app.add_subcommand("cluster", "Cluster a session dump");
  cluster->add_option("--sessions", f.from_sessions, "Session dump")->required();
  add_cluster_options(*cluster, f);
  cluster->add_option("--threads", threads, "Worker threads for similarity (0 = all cores)");

  std::size_t transactions = 0;
  std::size_t profiles = 10;
  std::uint64_t synth_seed = 1;
  std::size_t session_count = 0;
  std::size_t site_pages = 50;
  std::size_t pages_per_profile = 5;
  std::size_t users_per_profile = 20;
  double asset_fraction = 0.0;
  bool overlapping = false;
  long long synth_timeout = kDefaultSessionTimeout.count();
  std::string synth_out, truth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic access log with ground truth");
  synth_cmd->add_option("--transactions", transactions, "Number of log lines")->required();
  synth_cmd->add_option("--profiles", profiles, "Number of user profiles")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--sessions", session_count, "Planted session count (default: calibrated)");
  synth_cmd->add_option("--pages", site_pages, "Pages on the site")->capture_default_str();
  synth_cmd->add_option("--pages-per-profile", pages_per_profile)->capture_default_str();
  synth_cmd->add_option("--users-per-profile", users_per_profile)->capture_default_str();
  synth_cmd->add_option("--asset-fraction", asset_fraction, "Share of static-asset lines")
      ->capture_default_str();
  synth_cmd->add_flag("--overlapping", overlapping, "Draw profile pages independently");
  synth_cmd->add_option("--timeout", synth_timeout, "Session timeout the gaps respect")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Log output (default stdout)");
  synth_cmd->add_option("--truth", truth_out, "Ground-truth JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  f.threads = threads;

  std::string stage = "config";
  try {
    if (synth_cmd->parsed()) {
      synth::TrafficModel model;
      model.profiles = profiles;
      model.seed = synth_seed;
      if (session_count) model.session_count = session_count;
      model.site_pages = site_pages;
      model.pages_per_profile = pages_per_profile;
      model.users_per_profile = users_per_profile;
      model.asset_fraction = asset_fraction;
      model.disjoint_profiles = !overlapping;
      model.timeout = std::chrono::seconds{synth_timeout};
      model.validate();
      stage = "synth";
      const auto log = synth::generate(model, transactions);
      if (synth_out.empty()) {
        out << log.text;
      } else {
        write_file(synth_out, log.text);
      }
      if (!truth_out.empty()) {
        std::ostringstream truth;
        synth::write_truth_json(truth, log.truth);
        write_file(truth_out, truth.str());
      }
      if (!synth_out.empty()) {
        out << "wrote " << log.lines << " lines, " << log.truth.session_count()
            << " planted sessions to " << synth_out << '\n';
      }
      return kOk;
    }

    const RunConfig cfg = resolve(f);
    if (sess->parsed()) {
      if (!cfg.dump_sessions) throw ConfigError("sessionize needs --dump-sessions");
      for (const auto& path : cfg.inputs) {
        stage = "parse";
        const auto ds = load_log(path, cfg, &err);
        out << path << ": " << ds.sessions.transactions << " transactions, "
            << ds.sessions.catalog.size() << " pages, " << ds.sessions.sessions.size()
            << " sessions\n";
      }
      return kOk;
    }
    return run_pipeline(cfg, out, err, stage);
  } catch (const ConfigError& e) {
    err << "antsess: " << stage << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    err << "antsess: " << stage << ": " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "antsess: " << stage << ": internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace antsess::cli
