#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <thread>

#include "helpers.hpp"
#include "ranharness/common/clock.hpp"
#include "ranharness/attacks/simulation.hpp"
#include "ranharness/config/plan.hpp"
#include "ranharness/config/seed.hpp"
#include "ranharness/controller/controller.hpp"
#include "ranharness/controller/report.hpp"
#include "ranharness/controller/runtime.hpp"

using namespace ranharness;
using namespace ranharness::controller;
using namespace std::chrono_literals;

namespace {

// Runner whose behaviour is chosen by component name prefix:
//   bad*   rejects its params
//   slow*  takes 300 ms to start
//   stuck* takes 300 ms to stop
class FakeRunner : public Runner {
 public:
  explicit FakeRunner(std::string name) : name_(std::move(name)) {}
  std::optional<std::string> start(const RunnerContext& ctx) override {
    seeds.push_back(ctx.seed);
    if (name_.rfind("bad", 0) == 0) return "bad params";
    if (name_.rfind("slow", 0) == 0) std::this_thread::sleep_for(300ms);
    return std::nullopt;
  }
  void stop() override {
    if (name_.rfind("stuck", 0) == 0) std::this_thread::sleep_for(300ms);
  }
  static inline std::vector<std::uint64_t> seeds;

 private:
  std::string name_;
};

class FakeFactory : public RunnerFactory {
 public:
  std::unique_ptr<Runner> make(const config::ComponentSpec& spec) override {
    return std::make_unique<FakeRunner>(spec.name);
  }
};

config::ExecutionPlan plan_of(const config::ScenarioSpec& spec) {
  auto r = config::build_plan(spec);
  if (!r) throw std::runtime_error("plan failed");
  return *r.value;
}

config::ScenarioSpec chain(std::vector<std::pair<std::string, std::vector<std::string>>> comps) {
  config::ScenarioSpec s;
  s.id = "ctl";
  s.seed = 5;
  s.duration_slots = 10;
  for (auto& [name, deps] : comps) s.components.push_back({name, "jammer", deps, {}, {}});
  return s;
}

struct Recorder {
  std::mutex mu;
  std::vector<Transition> seen;
  std::function<void(const Transition&)> fn() {
    return [this](const Transition& t) {
      std::lock_guard lock(mu);
      seen.push_back(t);
    };
  }
};

std::int64_t first_ts(const std::vector<Transition>& ts, const std::string& c, State to) {
  for (const auto& t : ts)
    if (t.component == c && t.to == to) return t.ts_ns;
  return -1;
}

void expect_legal_paths(const std::vector<Transition>& ts) {
  std::map<std::string, State> at;
  std::int64_t last_ts = 0;
  std::uint64_t last_seq = 0;
  bool first = true;
  for (const auto& t : ts) {
    const State from = at.count(t.component) ? at[t.component] : State::Pending;
    EXPECT_EQ(t.from, from) << t.component;
    EXPECT_TRUE(legal_transition(t.from, t.to))
        << t.component << " " << to_string(t.from) << "->" << to_string(t.to);
    if (t.to == State::Failed) EXPECT_TRUE(t.reason && !t.reason->empty());
    if (!first) {
      EXPECT_GT(t.ts_ns, last_ts);
      EXPECT_EQ(t.seq, last_seq + 1);
    }
    first = false;
    last_ts = t.ts_ns;
    last_seq = t.seq;
    at[t.component] = t.to;
  }
}

}  // namespace

TEST(Status, LegalEdges) {
  EXPECT_TRUE(legal_transition(State::Pending, State::Starting));
  EXPECT_TRUE(legal_transition(State::Starting, State::Running));
  EXPECT_TRUE(legal_transition(State::Running, State::Degraded));
  EXPECT_TRUE(legal_transition(State::Degraded, State::Running));
  EXPECT_TRUE(legal_transition(State::Failed, State::Starting));
  EXPECT_FALSE(legal_transition(State::Pending, State::Running));
  EXPECT_FALSE(legal_transition(State::Failed, State::Running));
  for (auto s : {State::Pending, State::Starting, State::Running, State::Degraded, State::Failed})
    EXPECT_FALSE(legal_transition(State::Stopped, s));
  for (auto s : {State::Pending, State::Starting, State::Running, State::Degraded, State::Stopped,
                 State::Failed})
    EXPECT_EQ(parse_state(to_string(s)), s);
}

TEST(Controller, StagesStartInOrderAndStopInReverse) {
  FakeFactory f;
  Recorder rec;
  ControllerOptions opt;
  opt.observer = rec.fn();
  auto run = start_run(plan_of(chain({{"gnb0", {}}, {"ue1", {"gnb0"}}, {"jam0", {"ue1"}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  for (const auto& [_, st] : run->statuses()) EXPECT_EQ(st.state, State::Running);
  auto report = stop_run(run);
  EXPECT_EQ(run->live_workers(), 0u);
  EXPECT_EQ(report.components.size(), 3u);
  for (const auto& c : report.components) EXPECT_EQ(c.status.state, State::Stopped);

  const auto ts = run->transitions();
  EXPECT_LT(first_ts(ts, "gnb0", State::Running), first_ts(ts, "ue1", State::Starting));
  EXPECT_LT(first_ts(ts, "ue1", State::Running), first_ts(ts, "jam0", State::Starting));
  EXPECT_LT(first_ts(ts, "jam0", State::Stopped), first_ts(ts, "ue1", State::Stopped));
  EXPECT_LT(first_ts(ts, "ue1", State::Stopped), first_ts(ts, "gnb0", State::Stopped));
  expect_legal_paths(ts);
  std::lock_guard lock(rec.mu);
  ASSERT_EQ(rec.seen.size(), ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_EQ(rec.seen[i].seq, ts[i].seq);
}

TEST(Controller, BadParamsLeaveDependentsPending) {
  FakeFactory f;
  auto run = start_run(plan_of(chain({{"bad0", {}}, {"ue1", {"bad0"}}, {"ok0", {}}})), f);
  ASSERT_TRUE(run->wait_startup(5s));
  EXPECT_EQ(run->status("bad0").state, State::Failed);
  EXPECT_EQ(run->status("bad0").reason, "bad params");
  EXPECT_EQ(run->status("ue1").state, State::Pending);
  EXPECT_EQ(run->status("ue1").reason, "dependency failed");
  EXPECT_EQ(run->status("ok0").state, State::Running);
  auto report = stop_run(run);
  EXPECT_TRUE(report.any_failed());
  EXPECT_EQ(run->status("ue1").state, State::Pending);

  auto logs = run->drain_logs();
  EXPECT_TRUE(std::any_of(logs.begin(), logs.end(), [](const LogRecord& r) {
    return r.component == "bad0" && r.level == LogLevel::error &&
           r.message.find("bad params") != std::string::npos;
  }));
}

TEST(Controller, StartTimeoutFails) {
  FakeFactory f;
  ControllerOptions opt;
  opt.start_timeout = 50ms;
  auto run = start_run(plan_of(chain({{"slow0", {}}, {"ue1", {"slow0"}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  EXPECT_EQ(run->status("slow0").state, State::Failed);
  EXPECT_EQ(run->status("slow0").reason, "start timeout");
  EXPECT_EQ(run->status("ue1").reason, "dependency failed");
  stop_run(run);
  EXPECT_EQ(run->status("slow0").state, State::Failed);  // late start does not revive it
  expect_legal_paths(run->transitions());
}

TEST(Controller, StopTimeoutMarksFailed) {
  FakeFactory f;
  ControllerOptions opt;
  opt.stop_timeout = 50ms;
  auto run = start_run(plan_of(chain({{"stuck0", {}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  auto report = stop_run(run);
  EXPECT_EQ(report.components[0].status.state, State::Failed);
  EXPECT_EQ(report.components[0].status.reason, "stop timeout");
  EXPECT_EQ(run->live_workers(), 0u);
}

TEST(Controller, SilencedWorkerDegradesAtThreeAndFailsAtSix) {
  auto clock = std::make_shared<ManualClock>();
  FakeFactory f;
  ControllerOptions opt;
  opt.clock = clock;
  opt.supervise = false;
  const auto interval = 500ms;
  auto run = start_run(plan_of(chain({{"gnb0", {}}, {"jam0", {"gnb0"}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  run->inject_fault("jam0", Fault::silence);

  for (int k = 1; k <= 7; ++k) {
    clock->advance(interval);
    run->supervise_once();
    const State s = run->status("jam0").state;
    if (k < 3) EXPECT_EQ(s, State::Running) << k;
    if (k >= 3 && k < 6) EXPECT_EQ(s, State::Degraded) << k;
    if (k >= 6) EXPECT_EQ(s, State::Failed) << k;
    EXPECT_NE(run->status("gnb0").state, State::Failed) << k;
    // Let the healthy worker observe the new time and heartbeat.
    const auto before = run->status("gnb0").heartbeats;
    for (int spin = 0; spin < 200 && run->status("gnb0").heartbeats == before; ++spin)
      std::this_thread::sleep_for(5ms);
  }
  EXPECT_EQ(run->status("jam0").reason, "heartbeat lost");
  EXPECT_EQ(run->status("gnb0").state, State::Running);

  // A late heartbeat does not revive a Failed component.
  run->heartbeat("jam0");
  EXPECT_EQ(run->status("jam0").state, State::Failed);
  run->heartbeat("nobody");  // ignored with a warning

  stop_run(run);
  EXPECT_EQ(run->live_workers(), 0u);
  expect_legal_paths(run->transitions());
}

TEST(Controller, HealthyWorkerStaysRunning) {
  auto clock = std::make_shared<ManualClock>();
  FakeFactory f;
  ControllerOptions opt;
  opt.clock = clock;
  opt.supervise = false;
  auto run = start_run(plan_of(chain({{"gnb0", {}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  for (int k = 0; k < 10; ++k) {
    const auto before = run->status("gnb0").heartbeats;
    clock->advance(500ms);
    for (int spin = 0; spin < 200 && run->status("gnb0").heartbeats == before; ++spin)
      std::this_thread::sleep_for(5ms);
    run->supervise_once();
    EXPECT_EQ(run->status("gnb0").state, State::Running);
  }
  EXPECT_GE(run->status("gnb0").heartbeats, 10u);
  stop_run(run);
}

TEST(Controller, KillThenRestart) {
  FakeFactory f;
  FakeRunner::seeds.clear();
  auto run = start_run(plan_of(chain({{"gnb0", {}}, {"jam0", {"gnb0"}}})), f);
  ASSERT_TRUE(run->wait_startup(5s));

  try {
    run->restart("gnb0");
    FAIL() << "expected throw";
  } catch (const std::logic_error& e) {
    EXPECT_STREQ(e.what(), "not restartable");
  }

  run->inject_fault("jam0", Fault::kill);
  ASSERT_TRUE(run->wait_for_state("jam0", State::Failed, 5s));
  EXPECT_EQ(run->status("jam0").reason, "killed by fault injection");

  auto st = run->restart("jam0");
  EXPECT_EQ(st.restarts, 1u);
  ASSERT_TRUE(run->wait_for_state("jam0", State::Running, 5s));
  auto report = stop_run(run);
  EXPECT_EQ(report.restarts, 1u);
  EXPECT_THROW(run->restart("jam0"), std::logic_error);

  // Restart draws a fresh seed stream.
  ASSERT_EQ(FakeRunner::seeds.size(), 3u);
  EXPECT_EQ(FakeRunner::seeds[2], config::restart_seed(5, "jam0", 1));
  EXPECT_NE(FakeRunner::seeds[1], FakeRunner::seeds[2]);
  expect_legal_paths(run->transitions());
}

TEST(Controller, NoRecordLostUnderConcurrentLogging) {
  FakeFactory f;
  ControllerOptions opt;
  opt.log_capacity = 256;  // force producers to block
  auto run = start_run(plan_of(chain({{"a", {}}, {"b", {}}})), f, opt);
  ASSERT_TRUE(run->wait_startup(5s));
  {
    std::vector<std::jthread> producers;
    for (int p = 0; p < 4; ++p)
      producers.emplace_back([&, p] {
        for (int i = 0; i < 2500; ++i)
          run->log("p" + std::to_string(p), LogLevel::debug, std::to_string(i), i);
      });
  }
  stop_run(run);
  auto logs = drain_logs(run);
  std::map<std::string, int> per;
  for (const auto& r : logs)
    if (r.component.size() == 2 && r.component[0] == 'p') ++per[r.component];
  ASSERT_EQ(per.size(), 4u);
  for (const auto& [_, n] : per) EXPECT_EQ(n, 2500);
  for (std::size_t i = 1; i < logs.size(); ++i) {
    const auto& a = logs[i - 1];
    const auto& b = logs[i];
    EXPECT_TRUE(std::tie(a.ts_ns, a.component, a.seq) < std::tie(b.ts_ns, b.component, b.seq));
  }
  std::map<std::string, std::int64_t> last;
  for (const auto& r : logs) {
    EXPECT_GE(r.ts_ns, last[r.component]);
    last[r.component] = r.ts_ns;
  }
}

TEST(Controller, RandomDagStaging) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<std::pair<std::string, std::vector<std::string>>> comps;
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> deps;
      for (int j = 0; j < i; ++j)
        if (rng() % 3 == 0) deps.push_back("c" + std::to_string(j));
      comps.push_back({"c" + std::to_string(i), deps});
    }
    std::shuffle(comps.begin(), comps.end(), rng);
    const auto spec = chain(comps);
    FakeFactory f;
    ControllerOptions opt;
    opt.poll = 2ms;
    auto run = start_run(plan_of(spec), f, opt);
    ASSERT_TRUE(run->wait_startup(5s));
    stop_run(run);
    ASSERT_EQ(run->live_workers(), 0u);
    const auto ts = run->transitions();
    expect_legal_paths(ts);
    for (const auto& c : spec.components)
      for (const auto& d : c.depends_on)
        ASSERT_LT(first_ts(ts, d, State::Running), first_ts(ts, c.name, State::Starting))
            << d << " -> " << c.name;
  }
}

TEST(Report, JsonRoundTrip) {
  RunReport r;
  r.scenario_id = "x";
  r.seed = 99;
  r.started_at_ns = 10;
  r.finished_at_ns = 20;
  r.heartbeats = 4;
  r.restarts = 1;
  r.log_records = 12;
  r.exports = {"metrics.csv"};
  r.event_digest = 0xDEADBEEFCAFEF00DULL;
  ComponentStatus st;
  st.state = State::Failed;
  st.reason = "killed by fault injection";
  st.restarts = 1;
  r.components.push_back({"jam0", "jammer", st});
  r.components.push_back({"gnb0", "gnb", {}});
  auto back = parse_report(to_json(r));
  EXPECT_EQ(back.scenario_id, "x");
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.event_digest, r.event_digest);
  ASSERT_EQ(back.components.size(), 2u);
  EXPECT_EQ(back.components[0].status.state, State::Failed);
  EXPECT_EQ(back.components[0].status.reason, "killed by fault injection");
  EXPECT_TRUE(back.any_failed());
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_THROW(parse_report("{"), std::runtime_error);
}

TEST(Runtime, ReferenceScenarioUnderSupervision) {
  auto loaded = config::load_scenario_file((ranharness::testing::source_dir() / "scenarios/full_attack.yaml").string());
  ASSERT_TRUE(loaded);
  auto spec = *loaded;
  spec.duration_slots = 1000;
  ScenarioRuntime rt(spec);
  auto run = start_run(plan_of(spec), rt, {}, &rt);
  ASSERT_TRUE(run->wait_workload(30s));
  auto report = stop_run(run);
  EXPECT_TRUE(rt.completed());
  EXPECT_EQ(rt.slots_run(), 1000u);
  for (const auto& c : report.components) EXPECT_EQ(c.status.state, State::Stopped) << c.name;
  EXPECT_EQ(run->live_workers(), 0u);

  // Same digest as the headless simulation of the same scenario.
  attacks::ScenarioSimulation sim(spec);
  sim.run();
  EXPECT_EQ(rt.digest(), sim.engine().digest());
  EXPECT_EQ(rt.store(), sim.store());
}
