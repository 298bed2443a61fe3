#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "helpers.hpp"
#include "ranharness/metrics/export.hpp"
#include "ranharness/metrics/hub.hpp"
#include "ranharness/metrics/line_protocol.hpp"
#include "ranharness/metrics/store.hpp"

using namespace ranharness::metrics;
using ranharness::testing::TempDir;

namespace {

MetricPoint point(const std::string& m, Tags tags, double v, std::uint64_t slot,
                  const std::string& field = "value") {
  tags.emplace("component", "c");
  return {m, std::move(tags), {{field, v}}, slot};
}

Query windowed(const std::string& m, Aggregation agg, std::uint64_t window,
               std::uint64_t from = 0, std::uint64_t to = UINT64_MAX) {
  Query q;
  q.measurement = m;
  q.agg = agg;
  q.window = window;
  q.from_slot = from;
  q.to_slot = to;
  return q;
}

// Straight-line reference aggregation, written without the store's bucket
// bookkeeping: group by bucket index in a map, then fold.
std::map<std::uint64_t, double> naive(const std::vector<Sample>& samples, Aggregation agg,
                                      std::uint64_t window, std::uint64_t from,
                                      std::uint64_t to) {
  std::map<std::uint64_t, std::vector<double>> groups;
  for (const auto& s : samples)
    if (s.slot >= from && s.slot <= to) groups[from + (s.slot - from) / window * window].push_back(s.value);
  std::map<std::uint64_t, double> out;
  for (const auto& [slot, vals] : groups) {
    double v = 0;
    switch (agg) {
      case Aggregation::mean: {
        double sum = 0;
        for (double x : vals) sum += x;
        v = sum / static_cast<double>(vals.size());
        break;
      }
      case Aggregation::max:
        v = vals[0];
        for (double x : vals) v = std::max(v, x);
        break;
      case Aggregation::min:
        v = vals[0];
        for (double x : vals) v = std::min(v, x);
        break;
      case Aggregation::count: v = static_cast<double>(vals.size()); break;
      case Aggregation::raw: break;
    }
    out[slot] = v;
  }
  return out;
}

}  // namespace

TEST(MetricPoint, Validation) {
  EXPECT_EQ(check_point(point("sinr", {}, 1.0, 0)), "");
  EXPECT_NE(check_point({"", {{"component", "c"}}, {{"v", 1}}, 0}), "");
  EXPECT_NE(check_point({"m", {{"component", "c"}}, {}, 0}), "");
  EXPECT_NE(check_point({"m", {}, {{"v", 1}}, 0}), "");
  EXPECT_NE(check_point({"m", {{"component", "c"}}, {{"v", std::nan("")}}, 0}), "");
}

TEST(MetricPoint, TagTextRoundTrip) {
  Tags t{{"ue", "ue1"}, {"component", "jam0"}};
  EXPECT_EQ(format_tags(t), "component=jam0;ue=ue1");
  EXPECT_EQ(parse_tags(format_tags(t)), t);
  EXPECT_TRUE(parse_tags("").empty());
}

TEST(MetricsStore, MeanOverOneWindow) {
  MetricsStore s;
  for (int i = 1; i <= 3; ++i) s.insert(point("m", {}, i, i));
  auto r = s.query(windowed("m", Aggregation::mean, 3, 1, 3));
  ASSERT_EQ(r.size(), 1u);
  ASSERT_EQ(r[0].fields.at("value").size(), 1u);
  EXPECT_EQ(r[0].fields.at("value")[0].value, 2.0);
  EXPECT_EQ(r[0].fields.at("value")[0].slot, 1u);
}

TEST(MetricsStore, RawTagFilter) {
  MetricsStore s;
  for (std::uint64_t i = 0; i < 10; ++i) {
    s.insert(point("sinr", {{"ue", "ue1"}}, 1.0, i));
    s.insert(point("sinr", {{"ue", "ue2"}}, 2.0, i));
  }
  Query q;
  q.measurement = "sinr";
  q.tag_filter = {{"ue", "ue1"}};
  auto r = s.query(q);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].tags.at("ue"), "ue1");
  EXPECT_EQ(r[0].fields.at("value").size(), 10u);
}

TEST(MetricsStore, UnknownMeasurementIsEmpty) {
  MetricsStore s;
  s.insert(point("m", {}, 1, 1));
  Query q;
  q.measurement = "nope";
  EXPECT_TRUE(s.query(q).empty());
}

TEST(MetricsStore, MalformedQueriesThrow) {
  MetricsStore s;
  Query q;
  q.measurement = "m";
  q.from_slot = 5;
  q.to_slot = 4;
  EXPECT_THROW(s.query(q), std::invalid_argument);
  q.from_slot = 0;
  q.window = 3;
  EXPECT_THROW(s.query(q), std::invalid_argument);  // window on raw
  q.window.reset();
  q.agg = Aggregation::mean;
  EXPECT_THROW(s.query(q), std::invalid_argument);
  q.window = 0;
  EXPECT_THROW(s.query(q), std::invalid_argument);
}

TEST(MetricsStore, RejectsNonIncreasingSlots) {
  MetricsStore s;
  EXPECT_EQ(s.insert(point("m", {}, 1, 5)), 1u);
  EXPECT_EQ(s.insert(point("m", {}, 1, 5)), 0u);
  EXPECT_EQ(s.insert(point("m", {}, 1, 4)), 0u);
  EXPECT_EQ(s.sample_count(), 1u);
  EXPECT_EQ(s.rejected_count(), 2u);
}

TEST(MetricsStore, WindowedAggregatesMatchNaiveReference) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    MetricsStore s;
    std::map<std::string, std::vector<Sample>> truth;
    std::uint64_t slot[2] = {0, 0};
    const char* ues[2] = {"ue1", "ue2"};
    for (int i = 0; i < 1000; ++i) {
      int u = static_cast<int>(rng() % 2);
      slot[u] += 1 + rng() % 5;
      double v = std::uniform_real_distribution<double>(-50.0, 50.0)(rng);
      s.insert(point("sinr", {{"ue", ues[u]}}, v, slot[u]));
      truth[ues[u]].push_back({slot[u], v});
    }
    const std::uint64_t window = 1 + rng() % 40;
    const std::uint64_t from = rng() % 100;
    const std::uint64_t to = from + 500 + rng() % 3000;
    for (auto agg : {Aggregation::mean, Aggregation::max, Aggregation::min, Aggregation::count}) {
      auto r = s.query(windowed("sinr", agg, window, from, to));
      for (const auto& series : r) {
        auto expect = naive(truth[series.tags.at("ue")], agg, window, from, to);
        const auto& got = series.fields.at("value");
        ASSERT_EQ(got.size(), expect.size());
        for (const auto& sample : got) {
          ASSERT_TRUE(expect.count(sample.slot));
          ASSERT_EQ(sample.value, expect.at(sample.slot)) << to_string(agg);
        }
      }
    }
  }
}

TEST(MetricsHub, OpenWriteQuery) {
  MetricsHub hub;
  auto s = hub.open_session("ue1");
  s->write({"sinr", {}, {{"sinr_db", 3.0}}, 7});
  hub.flush();
  Query q;
  q.measurement = "sinr";
  auto r = hub.store().query(q);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].tags.at("component"), "ue1");
  EXPECT_EQ(r[0].fields.at("sinr_db")[0].value, 3.0);
}

TEST(MetricsHub, DuplicateSessionIsAnError) {
  MetricsHub hub;
  hub.open_session("a");
  EXPECT_THROW(hub.open_session("a"), std::logic_error);
}

TEST(MetricsHub, WriteAfterCloseFails) {
  MetricsHub hub;
  auto s = hub.open_session("a");
  s->close();
  try {
    s->write({"m", {}, {{"v", 1}}, 0});
    FAIL() << "expected throw";
  } catch (const std::logic_error& e) {
    EXPECT_STREQ(e.what(), "session closed");
  }
}

TEST(MetricsHub, ConcurrentSessionsConserveEveryPoint) {
  TempDir dir;
  constexpr int kSessions = 8;
  constexpr int kPoints = 5000;
  MetricsHub hub(64);  // small queue so producers block
  std::vector<std::jthread> producers;
  for (int i = 0; i < kSessions; ++i) {
    auto s = hub.open_session("p" + std::to_string(i));
    producers.emplace_back([s] {
      for (int n = 0; n < kPoints; ++n)
        s->write({"load", {}, {{"v", static_cast<double>(n)}}, static_cast<std::uint64_t>(n)});
    });
  }
  producers.clear();
  hub.flush();
  EXPECT_EQ(hub.store().sample_count(), static_cast<std::size_t>(kSessions * kPoints));

  export_store(hub.store(), ExportFormat::csv, dir / "m.csv");
  std::istringstream in(ranharness::testing::slurp(dir / "m.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<std::size_t>(kSessions * kPoints));
}

TEST(MetricsHub, StalledSessionDoesNotBlockOthers) {
  MetricsHub hub(4);
  auto a = hub.open_session("a");
  auto b = hub.open_session("b");
  // a fills its queue; b still makes progress independently.
  for (int i = 0; i < 4; ++i) a->write({"m", {}, {{"v", 1}}, static_cast<std::uint64_t>(i)});
  for (int i = 0; i < 100; ++i) b->write({"m", {}, {{"v", 1}}, static_cast<std::uint64_t>(i)});
  hub.flush();
  EXPECT_EQ(hub.store().sample_count(), 104u);
}

TEST(Export, EmptyStoreIsHeaderOnly) {
  MetricsStore s;
  std::ostringstream os;
  write_csv(s, os);
  EXPECT_EQ(os.str(), "measurement,tags,ts_slot,field,value\n");
}

TEST(Export, OrderingIsDeterministic) {
  MetricsStore a, b;
  // Same content, different insertion order across series.
  a.insert(point("z", {{"ue", "ue2"}}, 1, 1));
  a.insert(point("a", {{"ue", "ue1"}}, 2, 1));
  b.insert(point("a", {{"ue", "ue1"}}, 2, 1));
  b.insert(point("z", {{"ue", "ue2"}}, 1, 1));
  std::ostringstream oa, ob;
  write_csv(a, oa);
  write_csv(b, ob);
  EXPECT_EQ(oa.str(), ob.str());
  EXPECT_EQ(oa.str(),
            "measurement,tags,ts_slot,field,value\n"
            "a,component=c;ue=ue1,1,value,2\n"
            "z,component=c;ue=ue2,1,value,1\n");
}

TEST(Export, CsvAndJsonRoundTrip) {
  MetricsStore s;
  std::mt19937_64 rng(5);
  for (std::uint64_t i = 1; i < 200; ++i) {
    s.insert(point("sinr", {{"ue", "ue" + std::to_string(i % 3)}}, -20.123456789 * i / 7, i));
    s.insert({"rrc", {{"component", "f"}, {"k", "2"}}, {{"ok", double(rng() % 2)}, {"n", 1e-300}}, i});
  }
  TempDir dir;
  export_store(s, ExportFormat::csv, dir / "m.csv");
  export_store(s, ExportFormat::json, dir / "m.json");
  EXPECT_EQ(import_store(dir / "m.csv"), s);
  EXPECT_EQ(import_store(dir / "m.json"), s);
}

TEST(Export, UnwritablePathCarriesOsCause) {
  MetricsStore s;
  try {
    export_store(s, ExportFormat::csv, "/nonexistent-dir/x/m.csv");
    FAIL() << "expected throw";
  } catch (const std::system_error& e) {
    EXPECT_EQ(e.code().value(), ENOENT);
  }
}

TEST(LineProtocol, RoundTrip) {
  auto p = parse_line("sinr,component=ue1,ue=ue1 sinr_db=-12.5,rx_dbm=-74 42");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->measurement, "sinr");
  EXPECT_EQ(p->tags.at("ue"), "ue1");
  EXPECT_EQ(p->fields.at("sinr_db"), -12.5);
  EXPECT_EQ(p->ts_slot, 42u);
  auto again = parse_line(format_line(*p));
  ASSERT_TRUE(again);
  EXPECT_EQ(again->fields, p->fields);
  EXPECT_EQ(again->tags, p->tags);

  std::string err;
  EXPECT_FALSE(parse_line("sinr", &err));
  EXPECT_FALSE(err.empty());
  EXPECT_FALSE(parse_line("sinr x=abc 1"));
}
