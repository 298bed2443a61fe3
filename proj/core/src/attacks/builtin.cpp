#include "ranharness/attacks/builtin.hpp"

#include <algorithm>
#include <cmath>

#include "ranharness/attacks/mutate.hpp"
#include "ranharness/common/format.hpp"
#include "ranharness/ransim/channel.hpp"
#include "ranharness/ransim/rrc.hpp"

namespace ranharness::attacks {

namespace {

void emit(metrics::PointWriter* w, std::string measurement, std::uint64_t slot,
          metrics::Fields fields, metrics::Tags tags) {
  if (w) w->write({std::move(measurement), std::move(tags), std::move(fields), slot});
}

std::optional<std::uint64_t> optional_slot(const config::ComponentSpec& spec, std::string_view key) {
  if (auto v = spec.optional_int(key)) return static_cast<std::uint64_t>(*v);
  return std::nullopt;
}

const ransim::GnbState* live_target(const ransim::SlotContext& ctx, const std::string& target) {
  const auto* gnb = ctx.view.gnb();
  if (!gnb || gnb->name() != target || gnb->failed()) return nullptr;
  return gnb;
}

}  // namespace

// Jammer

std::optional<std::string> Jammer::init(const InitContext& ctx) {
  metrics_ = ctx.metrics;
  gain_db_ = ctx.spec.number_param("gain_db");
  distance_m_ = ctx.spec.number_param("distance_m");
  start_ = ctx.spec.has_param("start_slot")
               ? static_cast<std::uint64_t>(ctx.spec.int_param("start_slot"))
               : 0;
  stop_ = optional_slot(ctx.spec, "stop_slot");
  if (stop_ && *stop_ < start_) return "stop_slot precedes start_slot";
  return std::nullopt;
}

bool Jammer::active_at(std::uint64_t slot) const {
  return slot >= start_ && (!stop_ || slot <= *stop_);
}

void Jammer::on_slot(const ransim::SlotContext& ctx) {
  if (ctx.final) return;
  const bool active = active_at(ctx.slot);
  if (active) ctx.commands.transmit(gain_db_, distance_m_);
  emit(metrics_, "jam_active", ctx.slot,
       active ? metrics::Fields{{"active", 1.0}, {"tx_dbm", gain_db_}}
              : metrics::Fields{{"active", 0.0}},
       {{"attack", "jammer"}});
}

// RRC fuzzer

std::optional<std::string> RrcFuzzer::init(const InitContext& ctx) {
  name_ = ctx.spec.name;
  target_ = ctx.spec.string_param("target");
  metrics_ = ctx.metrics;
  rng_.emplace(ctx.seed);
  k_ = static_cast<std::uint32_t>(ctx.spec.int_param("bits_to_flip"));
  attempts_ = ctx.spec.has_param("attempts")
                  ? static_cast<std::uint32_t>(ctx.spec.int_param("attempts"))
                  : 100;
  if (k_ > ransim::kSetupRequestBytes * 8) return "bits_to_flip exceeds message length";
  return std::nullopt;
}

void RrcFuzzer::on_slot(const ransim::SlotContext& ctx) {
  if (in_flight_) {
    bool accepted = false;
    if (ctx.previous && ctx.previous->slot == in_flight_->slot) {
      for (const auto& d : ctx.previous->rrc)
        if (d.source == name_) accepted = d.accepted;
    }
    ++resolved_;
    if (accepted) ++successes_;
    emit(metrics_, "rrc_attempt", in_flight_->slot,
         {{"success", accepted ? 1.0 : 0.0},
          {"bits_flipped", double(k_)},
          {"attempt", double(resolved_)},
          {"mask_hi", double(in_flight_->mask >> 28)},
          {"mask_lo", double(in_flight_->mask & 0xFFFFFFF)}},
         {{"attack", "rrc_fuzzer"}, {"k", std::to_string(k_)}});
    in_flight_.reset();
  }
  if (ctx.final || sent_ >= attempts_ || !live_target(ctx, target_)) return;

  ransim::RrcSetupRequest msg;
  msg.ue_identity = rng_->below(ransim::kMaxIdentity + 1);
  msg.establishment_cause = static_cast<std::uint8_t>(rng_->below(8));
  const auto clean = ransim::encode_setup_request(msg);
  auto sdu = flip_bits(clean, k_, *rng_);
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < sdu.size(); ++i) mask = (mask << 8) | (clean[i] ^ sdu[i]);
  ctx.commands.rrc(std::move(sdu));
  ++sent_;
  in_flight_ = InFlight{ctx.slot, mask};
}

// RACH flooder

std::optional<std::string> RachFlooder::init(const InitContext& ctx) {
  name_ = ctx.spec.name;
  metrics_ = ctx.metrics;
  rng_.emplace(ctx.seed);
  per_occasion_ = static_cast<std::uint32_t>(ctx.spec.int_param("preambles_per_occasion"));
  start_ = ctx.spec.has_param("start_slot")
               ? static_cast<std::uint64_t>(ctx.spec.int_param("start_slot"))
               : 0;
  stop_ = optional_slot(ctx.spec, "stop_slot");
  if (per_occasion_ == 0) return "preambles_per_occasion must be positive";
  if (stop_ && *stop_ < start_) return "stop_slot precedes start_slot";
  return std::nullopt;
}

void RachFlooder::on_slot(const ransim::SlotContext& ctx) {
  if (ctx.previous && ctx.previous->rach_occasion) {
    const std::string prefix = name_ + "/";
    double granted = 0, collision = 0, dropped = 0;
    for (const auto& o : ctx.previous->rach) {
      if (o.source.compare(0, prefix.size(), prefix) != 0) continue;
      switch (o.result) {
        case ransim::RachResult::granted: ++granted; break;
        case ransim::RachResult::collision: ++collision; break;
        case ransim::RachResult::dropped: ++dropped; break;
      }
    }
    if (granted + collision + dropped > 0)
      emit(metrics_, "flood_outcome", ctx.previous->slot,
           {{"granted", granted}, {"collision", collision}, {"dropped", dropped}},
           {{"attack", "rach_flooder"}});
  }
  if (ctx.final) return;
  if (ctx.slot < start_ || (stop_ && ctx.slot > *stop_)) return;
  const auto* gnb = ctx.view.gnb();
  if (!gnb || gnb->failed() || !gnb->is_occasion(ctx.slot)) return;
  for (std::uint32_t i = 0; i < per_occasion_; ++i)
    ctx.commands.preamble(static_cast<std::uint32_t>(rng_->below(ransim::kPreambleCount)),
                          std::to_string(i));
  sent_ += per_occasion_;
  emit(metrics_, "flood_sent", ctx.slot, {{"preambles", double(per_occasion_)}},
       {{"attack", "rach_flooder"}});
}

// DCI sniffer

std::optional<std::string> DciSniffer::init(const InitContext& ctx) {
  target_ = ctx.spec.string_param("target");
  metrics_ = ctx.metrics;
  return std::nullopt;
}

void DciSniffer::on_slot(const ransim::SlotContext& ctx) {
  const auto* gnb = ctx.view.gnb();
  if (!ctx.previous || !gnb || gnb->name() != target_ || ctx.previous->dci.empty()) return;
  const auto& dcis = ctx.previous->dci;
  std::map<std::uint32_t, int> uses;
  for (const auto& d : dcis) ++uses[d.candidate];
  std::uint64_t got = 0;
  for (const auto& d : dcis) {
    if (uses[d.candidate] != 1) continue;
    ++got;
    ++per_rnti_[d.rnti];
  }
  seen_ += dcis.size();
  captured_ += got;
  emit(metrics_, "dci_capture", ctx.previous->slot,
       {{"seen", double(dcis.size())},
        {"captured", double(got)},
        {"rate", double(captured_) / double(seen_)}},
       {{"attack", "dci_sniffer"}});
}

std::set<std::uint16_t> DciSniffer::rntis() const {
  std::set<std::uint16_t> out;
  for (const auto& [r, _] : per_rnti_) out.insert(r);
  return out;
}

// IQ collector

std::optional<std::string> IqCollector::init(const InitContext& ctx) {
  metrics_ = ctx.metrics;
  burst_len_ = static_cast<std::uint64_t>(ctx.spec.int_param("burst_len"));
  period_ = static_cast<std::uint64_t>(ctx.spec.int_param("period"));
  position_m_ = ctx.spec.position_m.value_or(0.0);
  noise_dbm_ = ctx.scenario.channel.noise_dbm;
  if (burst_len_ == 0 || period_ == 0) return "burst_len and period must be positive";
  if (!ctx.artifact_dir.empty()) {
    const auto path = ctx.artifact_dir / ("iq_" + ctx.spec.name + ".csv");
    artifact_.open(path, std::ios::binary | std::ios::trunc);
    if (!artifact_) return "cannot open " + path.string();
    artifact_ << "slot,source,power_dbm\n";
  }
  return std::nullopt;
}

void IqCollector::on_slot(const ransim::SlotContext& ctx) {
  if (!ctx.previous) return;
  const std::uint64_t s = ctx.previous->slot;
  if (s % period_ >= burst_len_) return;
  const std::size_t first = samples_.size();
  samples_.push_back({s, "noise", noise_dbm_});
  for (const auto& tx : ctx.previous->transmissions) {
    const double d = std::abs(tx.position_m - position_m_);
    samples_.push_back({s, tx.source, tx.tx_dbm - ransim::path_loss_db(d, ctx.view.channel())});
  }
  double peak = noise_dbm_;
  for (std::size_t i = first; i < samples_.size(); ++i) {
    peak = std::max(peak, samples_[i].power_dbm);
    if (artifact_.is_open())
      artifact_ << samples_[i].slot << ',' << samples_[i].source << ','
                << format_double(samples_[i].power_dbm) << '\n';
  }
  emit(metrics_, "iq_burst", s,
       {{"sources", double(samples_.size() - first)}, {"peak_dbm", peak}},
       {{"attack", "iq_collector"}});
}

void IqCollector::stop() {
  if (artifact_.is_open()) artifact_.close();
}

std::size_t IqCollector::rows() const { return samples_.size(); }

std::vector<IqBurst> IqCollector::bursts() const {
  std::vector<IqBurst> out;
  std::size_t i = 0;
  while (i < samples_.size()) {
    IqBurst b;
    b.start_slot = samples_[i].slot - samples_[i].slot % period_;
    std::size_t j = i;
    while (j < samples_.size() && samples_[j].slot - samples_[j].slot % period_ == b.start_slot) {
      if (std::find(b.sources.begin(), b.sources.end(), samples_[j].source) == b.sources.end())
        b.sources.push_back(samples_[j].source);
      if (b.slots.empty() || b.slots.back() != samples_[j].slot) b.slots.push_back(samples_[j].slot);
      ++j;
    }
    b.power.assign(b.slots.size(), std::vector<double>(b.sources.size(), noise_dbm_));
    for (std::size_t k = i; k < j; ++k) {
      const auto row = std::find(b.slots.begin(), b.slots.end(), samples_[k].slot) - b.slots.begin();
      const auto col =
          std::find(b.sources.begin(), b.sources.end(), samples_[k].source) - b.sources.begin();
      b.power[row][col] = samples_[k].power_dbm;
    }
    out.push_back(std::move(b));
    i = j;
  }
  return out;
}

}  // namespace ranharness::attacks
