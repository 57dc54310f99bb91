#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "antsess/antclust.hpp"
#include "antsess/log_ingest.hpp"
#include "antsess/report.hpp"
#include "antsess/sessionizer.hpp"
#include "antsess/synth.hpp"
#include "test_support.hpp"

namespace antsess::report {
namespace {

using antclust::ClusterAssignment;
using antclust::Label;

ClusterAssignment labels_of(std::vector<Label> labels) { return ClusterAssignment{std::move(labels)}; }

TEST(Summarize, CountsAndDominatingShare) {
  // Cluster sizes 5, 3, 2, 1, 1 -> top four hold 11 of 12.
  const auto a = labels_of({1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4, 5});
  RunMeta meta;
  meta.transactions = 900;
  meta.seed = 4;
  const auto r = summarize(a, meta);
  EXPECT_EQ(r.transactions, 900);
  EXPECT_EQ(r.seed, 4u);
  EXPECT_EQ(r.sessions, 12u);
  EXPECT_EQ(r.clusters, 5u);
  EXPECT_EQ(r.cluster_sizes, (std::vector<std::size_t>{5, 3, 2, 1, 1}));
  EXPECT_DOUBLE_EQ(r.dominating_share, 11.0 / 12.0);
}

TEST(Summarize, FewerThanFourClustersShareIsOne) {
  EXPECT_EQ(summarize(labels_of({1, 2, 2}), {}).dominating_share, 1.0);
  EXPECT_EQ(summarize(labels_of({1}), {}).clusters, 1u);
}

TEST(Summarize, EmptyAssignmentRejected) {
  EXPECT_THROW(summarize(labels_of({}), {}), std::invalid_argument);
}

TEST(Summarize, InvariantUnderRelabelingAndPermutation) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> labels(1 + rng() % 40);
    for (auto& l : labels) l = 1 + rng() % 7;
    const auto base = summarize(labels_of(labels), {});
    auto shuffled = labels;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& l : shuffled) l = 100 - l;
    const auto other = summarize(labels_of(shuffled), {});
    ASSERT_EQ(base.clusters, other.clusters);
    ASSERT_EQ(base.cluster_sizes, other.cluster_sizes);
    ASSERT_EQ(base.dominating_share, other.dominating_share);
    std::size_t sum = 0;
    for (auto s : base.cluster_sizes) sum += s;
    ASSERT_EQ(sum, base.sessions);
    ASSERT_GT(base.dominating_share, 0.0);
    ASSERT_LE(base.dominating_share, 1.0);
  }
}

ClusterReport report_with(std::int64_t tx, std::size_t sessions, std::size_t clusters,
                          double share, double seconds) {
  ClusterReport r;
  r.transactions = tx;
  r.sessions = sessions;
  r.clusters = clusters;
  r.dominating_share = share;
  r.timings.simulate = seconds;
  return r;
}

TEST(EmitTable, EmptyCsvIsHeaderOnly) {
  EXPECT_EQ(emit_table({}, TableFormat::Csv),
            "transactions,sessions,clusters,dominating_share,total_seconds\n");
  EXPECT_EQ(emit_table({}, TableFormat::Json), "[]\n");
}

TEST(EmitTable, CsvRowsSortedByTransactions) {
  const auto csv = emit_table({report_with(20000, 396, 10, 0.5, 1.25),
                               report_with(5000, 129, 9, 0.61234, 0.5)},
                              TableFormat::Csv);
  EXPECT_EQ(csv,
            "transactions,sessions,clusters,dominating_share,total_seconds\n"
            "5000,129,9,0.6123,0.500\n"
            "20000,396,10,0.5000,1.250\n");
  const auto quiet = emit_table({report_with(5000, 129, 9, 0.5, 3.0)}, TableFormat::Csv, false);
  EXPECT_NE(quiet.find("0.5000,0.000"), std::string::npos);
}

TEST(EmitTable, TextColumnsAligned) {
  const auto text = emit_table({report_with(5000, 129, 9, 0.5, 0.5),
                                report_with(50000, 917, 11, 0.45, 12.0)},
                               TableFormat::Text);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].size(), lines[1].size());
  EXPECT_EQ(lines[1].size(), lines[2].size());
  EXPECT_NE(lines[0].find("transactions"), std::string::npos);
}

TEST(EmitTable, JsonRowsCarryClusterSizesAndTimings) {
  auto r = report_with(5000, 3, 2, 1.0, 0.1234);
  r.cluster_sizes = {2, 1};
  const auto j = nlohmann::json::parse(emit_table({r}, TableFormat::Json));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["cluster_sizes"], nlohmann::json::array({2, 1}));
  EXPECT_DOUBLE_EQ(j[0]["timings"]["simulate"].get<double>(), 0.123);
  const auto quiet = nlohmann::json::parse(emit_table({r}, TableFormat::Json, false));
  EXPECT_EQ(quiet[0]["timings"]["total"].get<double>(), 0.0);
}

TEST(Average, MeansOverRuns) {
  const std::vector<ClusterReport> runs = {report_with(5000, 130, 9, 0.5, 1.0),
                                           report_with(5000, 130, 11, 0.7, 3.0)};
  const auto row = average(runs);
  EXPECT_EQ(row.runs, 2u);
  EXPECT_EQ(row.transactions, 5000);
  EXPECT_DOUBLE_EQ(row.clusters, 10.0);
  EXPECT_DOUBLE_EQ(row.dominating_share, 0.6);
  EXPECT_DOUBLE_EQ(row.total_seconds, 2.0);
}

TEST(TableFormatNames, Parse) {
  EXPECT_EQ(table_format_from_string("csv"), TableFormat::Csv);
  EXPECT_EQ(table_format_from_string("text"), TableFormat::Text);
  EXPECT_EQ(table_format_from_string("json"), TableFormat::Json);
  EXPECT_FALSE(table_format_from_string("xml"));
}

TEST(AdjustedRandIndex, KnownValues) {
  const std::vector<std::size_t> a = {0, 0, 1, 1};
  const std::vector<std::size_t> same_split = {5, 5, 9, 9};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, same_split), 1.0);
  // Classic example: ARI of {0,0,1,1} vs {0,1,0,1} is -0.5.
  const std::vector<std::size_t> crossed = {0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, crossed), -0.5);
}

TEST(AdjustedRandIndex, MatchesPairCountingOracle) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = 2 + rng() % 60;
    std::vector<std::size_t> a(n), b(n);
    const auto ka = 1 + rng() % 6, kb = 1 + rng() % 6;
    for (auto& x : a) x = rng() % ka;
    for (auto& x : b) x = rng() % kb;
    ASSERT_NEAR(adjusted_rand_index(a, b), testing::pair_counting_ari(a, b), 1e-9);
    ASSERT_NEAR(adjusted_rand_index(a, b), adjusted_rand_index(b, a), 1e-12);
  }
}

// End-to-end on the synthetic workload: sessions near the reference count
// for 20k lines, and a plausible number of clusters.
TEST(EndToEnd, TwentyThousandLines) {
  const auto log = synth::generate(synth::TrafficModel{}, 20000);
  std::istringstream in(log.text);
  const auto parsed = parse_log(in, LogFormat::CommonLogFormat);
  const auto pages = filter_page_requests(parsed.records);
  const auto sessions = sessionize(pages, build_catalog(pages));
  const double reference = 396;
  EXPECT_GE(static_cast<double>(sessions.size()), reference * 0.85);
  EXPECT_LE(static_cast<double>(sessions.size()), reference * 1.15);
  const auto assignment =
      antclust::run(sessions, SimilarityMeasure{SimilarityKind::JaccardTransaction, {}}, {});
  RunMeta meta;
  meta.transactions = static_cast<std::int64_t>(parsed.records.size());
  const auto r = summarize(assignment, meta);
  EXPECT_EQ(r.transactions, 20000);
  EXPECT_GE(r.clusters, 8u);
  EXPECT_LE(r.clusters, 14u);
}

}  // namespace
}  // namespace antsess::report
