#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "helpers.hpp"
#include "ranharness/controller/report.hpp"
#include "ranharness/metrics/export.hpp"

using namespace ranharness;
using namespace ranharness::cli;
using ranharness::testing::slurp;
using ranharness::testing::source_dir;
using ranharness::testing::TempDir;

namespace {

std::string data(const std::string& name) { return (source_dir() / "tests/data" / name).string(); }
std::string reference() { return (source_dir() / "scenarios/full_attack.yaml").string(); }

struct Out {
  std::ostringstream out, err;
};

}  // namespace

TEST(CliValidate, ExitCodes) {
  Out o;
  EXPECT_EQ(cmd_validate(reference(), o.out, o.err), kOk);
  EXPECT_NE(o.out.str().find("OK"), std::string::npos);

  Out c;
  EXPECT_EQ(cmd_validate(data("cycle.yaml"), c.out, c.err), kInvalid);
  EXPECT_NE((c.out.str() + c.err.str()).find("cycle"), std::string::npos);

  Out d;
  EXPECT_EQ(cmd_validate(data("dangling_target.yaml"), d.out, d.err), kInvalid);
  EXPECT_NE((d.out.str() + d.err.str()).find("components[1].params.target"), std::string::npos);

  Out m;
  EXPECT_EQ(cmd_validate(data("malformed.yaml"), m.out, m.err), kInvalid);

  Out missing;
  EXPECT_EQ(cmd_validate(data("does_not_exist.yaml"), missing.out, missing.err), kInternal);
}

TEST(CliPlan, PrintsStages) {
  Out o;
  ASSERT_EQ(cmd_plan(reference(), o.out, o.err), kOk);
  const auto text = o.out.str();
  EXPECT_NE(text.find("stage 0: gnb0"), std::string::npos);
  EXPECT_NE(text.find("stage 2:"), std::string::npos);
  EXPECT_EQ(text.find("stage 3:"), std::string::npos);
  Out c;
  EXPECT_EQ(cmd_plan(data("cycle.yaml"), c.out, c.err), kInvalid);
}

TEST(CliRun, ReferenceRunWritesArtifactsAndReport) {
  TempDir dir;
  RunOptions opt;
  opt.outdir = dir.path();
  opt.duration_override = 1200;
  Out o;
  ASSERT_EQ(cmd_run(reference(), opt, o.out, o.err), kOk) << o.err.str();
  for (const char* f : {"metrics.csv", "report.json", "run.log"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;

  auto report = controller::parse_report(slurp(dir / "report.json"));
  EXPECT_EQ(report.components.size(), 7u);
  EXPECT_FALSE(report.any_failed());
  ASSERT_TRUE(report.event_digest);

  // report subcommand reads the same run back.
  Out r;
  ASSERT_EQ(cmd_report(dir.path(), r.out, r.err), kOk);
  std::ostringstream digest;
  digest << std::hex << *report.event_digest;
  EXPECT_NE(r.out.str().find(digest.str()), std::string::npos);
  EXPECT_NE(r.out.str().find("components (7)"), std::string::npos);

  // Every log line is a JSON object with the documented keys.
  std::istringstream log(slurp(dir / "run.log"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    ++lines;
    EXPECT_EQ(line.rfind("{\"ts\":", 0), 0u) << line;
    EXPECT_NE(line.find("\"component\":"), std::string::npos);
  }
  EXPECT_EQ(static_cast<std::uint64_t>(lines), report.log_records);

  Out e;
  ASSERT_EQ(cmd_export(dir.path(), metrics::ExportFormat::json, e.out, e.err), kOk);
  EXPECT_EQ(metrics::import_store(dir / "metrics.json"), metrics::import_store(dir / "metrics.csv"));
}

TEST(CliRun, OverridesChangeTheRun) {
  TempDir a, b;
  RunOptions opt;
  opt.duration_override = 300;
  opt.outdir = a.path();
  Out o1, o2;
  ASSERT_EQ(cmd_run(reference(), opt, o1.out, o1.err), kOk);
  opt.outdir = b.path();
  opt.seed_override = 1;
  ASSERT_EQ(cmd_run(reference(), opt, o2.out, o2.err), kOk);
  auto ra = controller::parse_report(slurp(a / "report.json"));
  auto rb = controller::parse_report(slurp(b / "report.json"));
  EXPECT_EQ(rb.seed, 1u);
  EXPECT_NE(ra.event_digest, rb.event_digest);
}

TEST(CliRun, InvalidScenarioExitsOne) {
  TempDir dir;
  RunOptions opt;
  opt.outdir = dir.path();
  Out o;
  EXPECT_EQ(cmd_run(data("dangling_target.yaml"), opt, o.out, o.err), kInvalid);
}

TEST(CliRun, CrashingFloodExitsTwo) {
  TempDir dir;
  RunOptions opt;
  opt.outdir = dir.path();
  Out o;
  EXPECT_EQ(cmd_run(data("crash_flood.yaml"), opt, o.out, o.err), kComponentFailure);
  auto report = controller::parse_report(slurp(dir / "report.json"));
  bool gnb_failed = false;
  for (const auto& c : report.components)
    if (c.name == "gnb0")
      gnb_failed = c.status.state == controller::State::Failed &&
                   c.status.reason == "contention overflow";
  EXPECT_TRUE(gnb_failed);
}

TEST(CliRun, InjectedKillExitsTwo) {
  TempDir dir;
  RunOptions opt;
  opt.outdir = dir.path();
  opt.duration_override = 500;
  opt.kills.push_back({"jam0", 100});
  Out o;
  EXPECT_EQ(cmd_run(reference(), opt, o.out, o.err), kComponentFailure);
  auto report = controller::parse_report(slurp(dir / "report.json"));
  for (const auto& c : report.components)
    if (c.name == "jam0") EXPECT_EQ(c.status.reason, "killed by fault injection");
}

TEST(CliRun, InterruptStopsGracefully) {
  TempDir dir;
  std::atomic<bool> stop{true};
  RunOptions opt;
  opt.outdir = dir.path();
  opt.interrupt = &stop;
  Out o;
  const int code = cmd_run(reference(), opt, o.out, o.err);
  EXPECT_TRUE(code == kOk || code == kComponentFailure);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
}

TEST(CliReport, MissingDirectory) {
  Out o;
  EXPECT_EQ(cmd_report("/nonexistent/run", o.out, o.err), kInternal);
  Out e;
  EXPECT_EQ(cmd_export("/nonexistent/run", metrics::ExportFormat::csv, e.out, e.err), kInternal);
}

TEST(CliKill, Parse) {
  auto k = parse_kill("jam0@120");
  ASSERT_TRUE(k);
  EXPECT_EQ(k->component, "jam0");
  EXPECT_EQ(k->slot, 120u);
  EXPECT_FALSE(parse_kill("jam0"));
  EXPECT_FALSE(parse_kill("@3"));
  EXPECT_FALSE(parse_kill("jam0@x"));
}
