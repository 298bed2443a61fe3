#include <benchmark/benchmark.h>

#include <filesystem>

#include "ranharness/attacks/simulation.hpp"
#include "ranharness/config/scenario.hpp"
#include "ranharness/metrics/store.hpp"
#include "ranharness/ransim/rrc.hpp"

namespace {

using namespace ranharness;

config::ScenarioSpec reference() {
  const auto path = std::filesystem::path(RANHARNESS_SOURCE_DIR) / "scenarios" / "full_attack.yaml";
  auto r = config::load_scenario_file(path.string());
  if (!r) throw std::runtime_error("reference scenario failed to parse");
  return *r;
}

void BM_ReferenceScenario(benchmark::State& state) {
  auto spec = reference();
  spec.duration_slots = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    attacks::ScenarioSimulation sim(spec);
    sim.run();
    benchmark::DoNotOptimize(sim.engine().digest());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReferenceScenario)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_RrcRoundTrip(benchmark::State& state) {
  ransim::RrcSetupRequest msg{0x123456789AULL, 5};
  for (auto _ : state) {
    auto bytes = ransim::encode_setup_request(msg);
    auto back = ransim::decode_setup_request(bytes);
    benchmark::DoNotOptimize(back);
    msg.ue_identity = (msg.ue_identity + 1) & ransim::kMaxIdentity;
  }
}
BENCHMARK(BM_RrcRoundTrip);

void BM_WindowedQuery(benchmark::State& state) {
  metrics::MetricsStore store;
  for (std::uint64_t s = 0; s < 100000; ++s)
    store.insert({"sinr", {{"component", "ue1"}, {"ue", "ue1"}}, {{"sinr_db", double(s % 97)}}, s});
  metrics::Query q;
  q.measurement = "sinr";
  q.agg = metrics::Aggregation::mean;
  q.window = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(store.query(q));
}
BENCHMARK(BM_WindowedQuery)->Arg(10)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
