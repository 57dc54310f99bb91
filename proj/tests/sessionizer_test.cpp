#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "antsess/error.hpp"
#include "antsess/sessionizer.hpp"
#include "antsess/synth.hpp"
#include "test_support.hpp"

namespace antsess {
namespace {

using testing::rec;

Timestamp at(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

TEST(Sessionize, SplitsOnGapsLongerThanTimeout) {
  const std::vector<LogRecord> records = {rec("c", 0, "/a"), rec("c", 10, "/b"),
                                          rec("c", 2000, "/a")};
  const auto catalog = build_catalog(records);
  const auto sessions = sessionize(records, catalog, std::chrono::seconds{1800});
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].history.size(), 2u);
  EXPECT_EQ(sessions[1].history.size(), 1u);
  EXPECT_EQ(sessions[1].start_time, at(2000));
}

TEST(Sessionize, GapEqualToTimeoutStaysInSession) {
  const std::vector<LogRecord> records = {rec("c", 0, "/a"), rec("c", 1800, "/b"),
                                          rec("c", 3601, "/c")};
  const auto sessions = sessionize(records, build_catalog(records), std::chrono::seconds{1800});
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].history.size(), 2u);
}

TEST(Sessionize, EmptyInput) {
  EXPECT_TRUE(sessionize({}, PageCatalog{}).empty());
}

TEST(Sessionize, EmptyCatalogWithRecords) {
  EXPECT_THROW(sessionize({rec("c", 0, "/a")}, PageCatalog{}), EmptyCatalog);
}

TEST(Sessionize, ResourceMissingFromCatalog) {
  EXPECT_THROW(sessionize({rec("c", 0, "/a")}, PageCatalog({"/b"})), InputError);
}

TEST(Sessionize, AllNineFieldsPopulated) {
  // A at 0, B at 30, A at 50 -> dwell 30, 20, mean(30, 20) = 25.
  const std::vector<LogRecord> records = {rec("10.1.1.1", 100, "/a"), rec("10.1.1.1", 130, "/b"),
                                          rec("10.1.1.1", 150, "/a")};
  const auto catalog = build_catalog(records);
  const auto sessions = sessionize(records, catalog);
  ASSERT_EQ(sessions.size(), 1u);
  const auto& s = sessions[0];
  EXPECT_EQ(s.client_id, "10.1.1.1");
  EXPECT_FALSE(s.identity);
  EXPECT_EQ(s.start_time, at(100));
  EXPECT_EQ(s.history, (std::vector<PageIndex>{0, 1, 0}));
  EXPECT_EQ(s.transaction_vector, (std::vector<PageIndex>{0, 1}));
  EXPECT_EQ(s.time_vector.at(0), 30 + 25);
  EXPECT_EQ(s.time_vector.at(1), 20);
  EXPECT_EQ(s.date_vector.at(0), at(100));
  EXPECT_EQ(s.date_vector.at(1), at(130));
  EXPECT_EQ(s.hits_vector.at(0), 2);
  EXPECT_EQ(s.hits_vector.at(1), 1);
  EXPECT_EQ(s.total_time, 75);
  EXPECT_EQ(s.catalog_size, 2u);
  EXPECT_EQ(s.catalog_id, catalog.fingerprint());
  EXPECT_TRUE(check_session(s).empty());
}

TEST(Sessionize, KnownIdentityPartitionsAcrossAddresses) {
  auto a = rec("10.0.0.1", 0, "/a");
  auto b = rec("10.0.0.2", 5, "/b");
  a.identity = "alice";
  b.identity = "alice";
  const auto c = rec("10.0.0.1", 7, "/c");
  const std::vector<LogRecord> records = {a, b, c};
  const auto sessions = sessionize(records, build_catalog(records));
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].identity, "alice");
  EXPECT_EQ(sessions[0].history.size(), 2u);
  EXPECT_EQ(sessions[0].client_id, "10.0.0.1");
  EXPECT_FALSE(sessions[1].identity);
}

TEST(EstimateTimes, LastPageGetsMeanOfOthers) {
  const std::vector<PageIndex> h = {0, 1, 2};
  const std::vector<Timestamp> t = {at(0), at(30), at(50)};
  const auto est = estimate_times(h, t);
  EXPECT_EQ(est.dwell, (std::vector<std::int64_t>{30, 20, 25}));
  EXPECT_EQ(est.total_time, 75);
}

TEST(EstimateTimes, ZeroDwellBecomesOneSecond) {
  const std::vector<PageIndex> h = {0, 1};
  const std::vector<Timestamp> t = {at(0), at(0)};
  const auto est = estimate_times(h, t);
  EXPECT_EQ(est.dwell, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(est.total_time, 2);
}

TEST(EstimateTimes, SingleVisitIsOneSecond) {
  // Every single-visit input, whatever its page or time, yields 1 s.
  for (PageIndex p = 0; p < 20; ++p) {
    for (std::int64_t t : {std::int64_t{0}, std::int64_t{1}, std::int64_t{1394459736}, std::int64_t{-5}}) {
      const std::vector<PageIndex> h = {p};
      const std::vector<Timestamp> ts = {at(t)};
      const auto est = estimate_times(h, ts);
      ASSERT_EQ(est.dwell, (std::vector<std::int64_t>{1}));
      ASSERT_EQ(est.total_time, 1);
      ASSERT_EQ(est.time_vector.at(p), 1);
    }
  }
}

TEST(EstimateTimes, MeanRoundsHalfUp) {
  const std::vector<PageIndex> h = {0, 1, 2};
  const std::vector<Timestamp> t = {at(0), at(1), at(3)};  // dwell 1, 2 -> mean 1.5
  EXPECT_EQ(estimate_times(h, t).dwell.back(), 2);
}

TEST(EstimateTimes, Errors) {
  const std::vector<PageIndex> h = {0, 1};
  const std::vector<Timestamp> one = {at(0)};
  EXPECT_THROW(estimate_times(h, one), std::invalid_argument);
  EXPECT_THROW(estimate_times({}, {}), std::invalid_argument);
  const std::vector<Timestamp> backwards = {at(5), at(0)};
  EXPECT_THROW(estimate_times(h, backwards), std::invalid_argument);
}

TEST(EstimateTimes, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = 1 + rng() % 12;
    std::vector<PageIndex> h;
    std::vector<Timestamp> ts;
    std::vector<std::int64_t> raw;
    std::int64_t t = 0;
    for (std::size_t k = 0; k < n; ++k) {
      t += static_cast<std::int64_t>(rng() % 4 == 0 ? 0 : rng() % 300);
      h.push_back(static_cast<PageIndex>(rng() % 5));
      ts.push_back(at(t));
      raw.push_back(t);
    }
    const auto est = estimate_times(h, ts);
    ASSERT_EQ(est.dwell, testing::dwell_oracle(raw));
  }
}

TEST(Sessionize, RecoversPlantedSessions) {
  synth::TrafficModel model;
  model.seed = 2;
  const auto log = synth::generate(model, 5000);
  std::istringstream in(log.text);
  const auto records = parse_log(in, LogFormat::CommonLogFormat).records;
  const auto catalog = build_catalog(records);
  const auto sessions = sessionize(records, catalog, model.timeout);
  ASSERT_EQ(sessions.size(), log.truth.session_count());

  // Same boundaries: planted session k is recovered session k and holds
  // exactly the records the generator put there.
  std::vector<std::size_t> planted_sizes(sessions.size(), 0);
  for (auto s : log.truth.record_session) ++planted_sizes[s];
  for (std::size_t k = 0; k < sessions.size(); ++k) {
    EXPECT_EQ(sessions[k].history.size(), planted_sizes[k]);
    EXPECT_EQ(sessions[k].client_id, log.truth.session_client[k]);
  }
}

TEST(Sessionize, InvariantUnderShufflingWithinClient) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LogRecord> records;
    for (int k = 0; k < 30; ++k) {
      records.push_back(rec("c" + std::to_string(rng() % 3), static_cast<std::int64_t>(rng() % 6000),
                            "/p" + std::to_string(rng() % 6)));
    }
    auto catalog = build_catalog(records);
    const auto expected = sessionize(records, catalog);
    std::shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(sessionize(records, catalog), expected);
  }
}

TEST(Sessionize, SessionsOfOneClientAreSeparatedByMoreThanTimeout) {
  std::mt19937 rng(31);
  const std::chrono::seconds timeout{600};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LogRecord> records;
    for (int k = 0; k < 40; ++k) {
      records.push_back(rec("c" + std::to_string(rng() % 4), static_cast<std::int64_t>(rng() % 20000),
                            "/p" + std::to_string(rng() % 8)));
    }
    const auto sessions = sessionize(records, build_catalog(records), timeout);
    std::map<std::string, std::vector<const Session*>> by_client;
    for (const auto& s : sessions) by_client[s.client_id].push_back(&s);
    for (const auto& [client, list] : by_client) {
      for (std::size_t k = 1; k < list.size(); ++k) {
        EXPECT_GT(list[k]->visit_times.front() - list[k - 1]->visit_times.back(), timeout);
      }
      for (const auto* s : list) {
        for (std::size_t k = 1; k < s->visit_times.size(); ++k)
          EXPECT_LE(s->visit_times[k] - s->visit_times[k - 1], timeout);
      }
    }
  }
}

TEST(CheckSession, FlagsBrokenInvariants) {
  auto s = testing::session_over({1, 2, 3});
  ASSERT_TRUE(check_session(s).empty());
  auto bad = s;
  bad.time_vector[2] = 0;
  EXPECT_FALSE(check_session(bad).empty());
  bad = s;
  bad.hits_vector[1] = 2;
  EXPECT_FALSE(check_session(bad).empty());
  bad = s;
  bad.date_vector.erase(3);
  EXPECT_FALSE(check_session(bad).empty());
  bad = s;
  bad.total_time += 1;
  EXPECT_FALSE(check_session(bad).empty());
  bad = s;
  bad.date_vector[1] = at(999);
  EXPECT_FALSE(check_session(bad).empty());
}

TEST(SessionDump, RoundTrip) {
  synth::TrafficModel model;
  model.seed = 6;
  const auto log = synth::generate(model, 2000);
  std::istringstream in(log.text);
  const auto records = parse_log(in, LogFormat::CommonLogFormat).records;
  SessionDump dump;
  dump.catalog = build_catalog(records);
  dump.sessions = sessionize(records, dump.catalog);
  dump.transactions = static_cast<std::int64_t>(records.size());

  std::stringstream buffer;
  write_sessions_jsonl(buffer, dump);
  const auto text = buffer.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            dump.sessions.size() + 1);

  const auto back = read_sessions_jsonl(buffer);
  EXPECT_EQ(back.catalog.pages(), dump.catalog.pages());
  EXPECT_EQ(back.transactions, dump.transactions);
  EXPECT_EQ(back.sessions, dump.sessions);

  std::ostringstream again;
  write_sessions_jsonl(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(SessionDump, RejectsInconsistentSessions) {
  SessionDump dump;
  dump.catalog = PageCatalog({"/a", "/b"});
  auto s = testing::session_over({0, 1}, 2, dump.catalog.fingerprint());
  s.total_time = 3;
  dump.sessions.push_back(s);
  std::stringstream buffer;
  write_sessions_jsonl(buffer, dump);
  EXPECT_THROW(read_sessions_jsonl(buffer), InputError);
}

TEST(SessionDump, RejectsGarbageAndMissingHeader) {
  std::istringstream garbage("{not json\n");
  EXPECT_THROW(read_sessions_jsonl(garbage), InputError);
  std::istringstream empty("");
  EXPECT_THROW(read_sessions_jsonl(empty), InputError);
  std::istringstream wrong_id(R"({"catalog":{"id":"0000000000000000","pages":["/a"]}})" "\n");
  EXPECT_THROW(read_sessions_jsonl(wrong_id), InputError);
}

}  // namespace
}  // namespace antsess
