#include <gtest/gtest.h>

#include <bitset>
#include <cmath>

#include "helpers.hpp"
#include "ranharness/attacks/builtin.hpp"
#include "ranharness/attacks/mutate.hpp"
#include "ranharness/attacks/registry.hpp"
#include "ranharness/attacks/simulation.hpp"
#include "ranharness/ransim/channel.hpp"

using namespace ranharness;
using namespace ranharness::attacks;
using ranharness::testing::must_parse;
using ranharness::testing::TempDir;

namespace {

std::size_t popcount(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::bitset<8>(a[i] ^ b[i]).count();
  return n;
}

std::string jam_scenario(double gain, std::uint64_t seed = 9) {
  return R"(
scenario: {id: jam, seed: )" + std::to_string(seed) + R"(, duration_slots: 400}
components:
  - {name: gnb0, kind: gnb}
  - {name: ue1, kind: ue, depends_on: [gnb0], position_m: 50}
  - {name: ue2, kind: ue, depends_on: [gnb0], position_m: 150}
  - name: jam0
    kind: jammer
    depends_on: [ue1, ue2]
    params: {gain_db: )" + std::to_string(gain) + R"(, distance_m: 100, start_slot: 200, stop_slot: 399}
)";
}

const char* kBase = R"(
scenario: {id: base, seed: 31, duration_slots: 600}
components:
  - {name: gnb0, kind: gnb}
  - {name: ue1, kind: ue, depends_on: [gnb0], position_m: 50}
  - {name: ue2, kind: ue, depends_on: [gnb0], position_m: 150, params: {attach_slot: 50}}
  - {name: flood0, kind: rach_flooder, depends_on: [gnb0], params: {preambles_per_occasion: 8, start_slot: 100, stop_slot: 300}}
  - {name: fuzz0, kind: rrc_fuzzer, depends_on: [gnb0], params: {bits_to_flip: 2, attempts: 50, target: gnb0}}
)";

const char* kObservers = R"(
  - {name: sniff0, kind: dci_sniffer, depends_on: [gnb0], params: {target: gnb0}}
  - {name: iq0, kind: iq_collector, position_m: 20, params: {burst_len: 4, period: 50}}
)";

std::uint64_t run_digest(const config::ScenarioSpec& spec, const Registry& reg = Registry::builtin()) {
  ScenarioSimulation sim(spec, reg);
  sim.run();
  return sim.engine().digest();
}

double sinr_at(const metrics::MetricsStore& store, const std::string& ue, std::uint64_t slot) {
  metrics::Query q;
  q.measurement = "sinr";
  q.tag_filter = {{"ue", ue}};
  q.from_slot = q.to_slot = slot;
  auto r = store.query(q);
  if (r.empty()) return NAN;
  return r[0].fields.at("sinr_db").at(0).value;
}

}  // namespace

TEST(FlipBits, ExactlyKDistinctBits) {
  Rng rng(1);
  const std::vector<std::uint8_t> base{0x01, 0x23, 0x45, 0x67, 0x89, 0xAB, 0xCD};
  for (std::size_t k = 0; k <= 56; ++k) {
    auto out = flip_bits(base, k, rng);
    ASSERT_EQ(out.size(), base.size());
    EXPECT_EQ(popcount(out, base), k);
  }
}

TEST(FlipBits, FullLengthIsComplement) {
  Rng rng(2);
  const std::vector<std::uint8_t> base{0x01, 0xF0, 0x0F};
  auto out = flip_bits(base, 24, rng);
  EXPECT_EQ(out, (std::vector<std::uint8_t>{0xFE, 0x0F, 0xF0}));
}

TEST(FlipBits, TooManyBitsThrows) {
  Rng rng(3);
  const std::vector<std::uint8_t> base(2);
  EXPECT_THROW(flip_bits(base, 17, rng), std::invalid_argument);
}

TEST(FlipBits, DeterministicAndUniform) {
  Rng a(4), b(4);
  const std::vector<std::uint8_t> base(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(flip_bits(base, 3, a), flip_bits(base, 3, b));

  // Single flips land on each of the 56 positions about equally often.
  Rng rng(5);
  std::array<int, 56> hits{};
  const int n = 56000;
  for (int i = 0; i < n; ++i) {
    auto out = flip_bits(base, 1, rng);
    for (int bit = 0; bit < 56; ++bit)
      if (out[bit / 8] & (0x80 >> (bit % 8))) ++hits[bit];
  }
  for (int h : hits) EXPECT_TRUE(ranharness::testing::within_3_sigma(h, n, 1.0 / 56)) << h;
}

TEST(Jammer, SinrMatchesLinkBudgetAndOrdering) {
  auto s45 = ScenarioSimulation(must_parse(jam_scenario(45)));
  s45.run();
  auto s60 = ScenarioSimulation(must_parse(jam_scenario(60)));
  s60.run();
  const config::ChannelSpec ch;

  // Closed form: interference arrives at the gNB from the jammer distance.
  auto expect = [&](double gain, double d) {
    const double rx = 20.0 - ransim::path_loss_db(d, ch);
    const double i = gain - ransim::path_loss_db(100.0, ch);
    return rx - 10 * std::log10(std::pow(10, i / 10) + std::pow(10, -9.4));
  };
  EXPECT_NEAR(expect(45, 50), -16.87, 0.01);
  EXPECT_NEAR(expect(45, 150), -29.75, 0.01);

  EXPECT_NEAR(sinr_at(s45.store(), "ue1", 200), expect(45, 50), 0.05);
  EXPECT_NEAR(sinr_at(s45.store(), "ue2", 200), expect(45, 150), 0.05);
  EXPECT_NEAR(sinr_at(s60.store(), "ue1", 200), expect(60, 50), 0.05);
  for (std::uint64_t t = 20; t < 200; ++t) {
    const double a = sinr_at(s45.store(), "ue1", t), b = sinr_at(s45.store(), "ue2", t);
    ASSERT_GT(a, b) << t;
    ASSERT_EQ(a, sinr_at(s60.store(), "ue1", t));
  }
}

TEST(Jammer, BothUesReleasedWithinRlfWindow) {
  ScenarioSimulation sim(must_parse(jam_scenario(60)));
  sim.run();
  metrics::Query q;
  q.measurement = "release";
  auto r = sim.store().query(q);
  ASSERT_EQ(r.size(), 2u);
  for (const auto& s : r) {
    const auto& at = s.fields.at("rlf");
    ASSERT_EQ(at.size(), 1u);
    EXPECT_EQ(at[0].value, 1.0);
    EXPECT_EQ(at[0].slot, 209u);
  }
  EXPECT_EQ(sim.engine().ue("ue1")->state, ransim::UeState::released);
}

TEST(Jammer, InactiveOutsideWindow) {
  auto spec = must_parse(jam_scenario(45));
  Jammer j;
  InitContext ctx{spec.components[3], spec, 1, nullptr, {}};
  ASSERT_FALSE(j.init(ctx));
  EXPECT_FALSE(j.active_at(199));
  EXPECT_TRUE(j.active_at(200));
  EXPECT_TRUE(j.active_at(399));
  EXPECT_FALSE(j.active_at(400));
}

TEST(Fuzzer, RecordsEveryAttemptWithMask) {
  auto spec = must_parse(kBase);
  ScenarioSimulation sim(spec);
  sim.run();
  auto* f = sim.component_as<RrcFuzzer>("fuzz0");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->sent(), 50u);
  EXPECT_EQ(f->resolved(), 50u);
  metrics::Query q;
  q.measurement = "rrc_attempt";
  auto r = sim.store().query(q);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].tags.at("k"), "2");
  const auto& bits = r[0].fields.at("bits_flipped");
  ASSERT_EQ(bits.size(), 50u);
  for (const auto& b : bits) EXPECT_EQ(b.value, 2.0);
  double ok = 0;
  for (const auto& s : r[0].fields.at("success")) ok += s.value;
  EXPECT_EQ(ok, f->successes());
}

TEST(Containment, PassiveObserversLeaveDigestUnchanged) {
  auto base = must_parse(kBase);
  auto observed = must_parse(std::string(kBase) + kObservers);
  EXPECT_EQ(run_digest(base), run_digest(observed));

  auto other = base;
  other.seed = 32;
  EXPECT_NE(run_digest(base), run_digest(other));
}

namespace {

class NoopAttack final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override {
    metrics_ = ctx.metrics;
    return std::nullopt;
  }
  void on_slot(const ransim::SlotContext& ctx) override {
    if (!ctx.final && metrics_) metrics_->write({"noop", {}, {{"tick", 1.0}}, ctx.slot});
  }

 private:
  metrics::PointWriter* metrics_ = nullptr;
};

}  // namespace

TEST(Registry, NoopExtensionKindRunsWithoutCoreChanges) {
  Registry reg = Registry::builtin();
  reg.add("noop", config::KindSchema{}, [] { return std::make_unique<NoopAttack>(); });

  const std::string doc = std::string(kBase) + "  - {name: nop0, kind: noop, depends_on: [gnb0]}\n";
  EXPECT_FALSE(config::parse_scenario(doc));  // unknown to the builtin catalog
  auto parsed = config::parse_scenario(doc, reg.catalog());
  ASSERT_TRUE(parsed);

  ScenarioSimulation sim(*parsed, reg);
  sim.run();
  metrics::Query q;
  q.measurement = "noop";
  q.agg = metrics::Aggregation::count;
  q.window = 1000;
  auto r = sim.store().query(q);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].fields.at("tick")[0].value, 600.0);
  EXPECT_EQ(sim.engine().digest(), run_digest(must_parse(kBase)));
}

TEST(Registry, BuiltinKinds) {
  const auto& reg = Registry::builtin();
  for (const char* k : {"jammer", "rrc_fuzzer", "rach_flooder", "dci_sniffer", "iq_collector"}) {
    EXPECT_TRUE(reg.has_factory(k)) << k;
    EXPECT_NE(reg.create(k), nullptr);
  }
  EXPECT_FALSE(reg.has_factory("gnb"));
  EXPECT_TRUE(is_engine_native("ue"));
  EXPECT_EQ(reg.create("nope"), nullptr);
}

TEST(Sniffer, SingleUeCapturesEverything) {
  auto spec = must_parse(R"(
scenario: {id: sn, seed: 4, duration_slots: 2000}
components:
  - {name: gnb0, kind: gnb}
  - {name: ue1, kind: ue, depends_on: [gnb0], position_m: 10}
  - {name: sniff0, kind: dci_sniffer, depends_on: [gnb0], params: {target: gnb0}}
)");
  ScenarioSimulation sim(spec);
  sim.run();
  auto* s = sim.component_as<DciSniffer>("sniff0");
  EXPECT_GT(s->seen(), 1900u);
  EXPECT_EQ(s->captured(), s->seen());
  const auto active = sim.engine().gnb()->active_rntis();
  EXPECT_EQ(s->rntis(), std::set<std::uint16_t>(active.begin(), active.end()));
}

TEST(IqCollector, BurstRowsAndArtifact) {
  TempDir dir;
  auto spec = must_parse(jam_scenario(45) + kObservers);
  ScenarioSimulation sim(spec, Registry::builtin(), dir.path());
  sim.run();
  auto* iq = sim.component_as<IqCollector>("iq0");
  ASSERT_NE(iq, nullptr);
  auto bursts = iq->bursts();
  ASSERT_EQ(bursts.size(), 8u);  // 400 slots / period 50
  for (const auto& b : bursts) {
    EXPECT_EQ(b.slots.size(), 4u);
    EXPECT_EQ(b.start_slot % 50, 0u);
    ASSERT_EQ(b.power.size(), 4u);
    EXPECT_EQ(b.power[0].size(), b.sources.size());
  }
  // Jammer is 80 m from the collector during the second half.
  const auto& late = bursts.back();
  auto col = std::find(late.sources.begin(), late.sources.end(), "jam0") - late.sources.begin();
  ASSERT_LT(col, static_cast<long>(late.sources.size()));
  EXPECT_NEAR(late.power[0][col], 45.0 - ransim::path_loss_db(80.0, spec.channel), 1e-9);

  const auto csv = ranharness::testing::slurp(dir / "iq_iq0.csv");
  EXPECT_EQ(csv.rfind("slot,source,power_dbm\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), iq->rows() + 1);
}
