#include "ranharness/ransim/gnb.hpp"

#include <algorithm>
#include <stdexcept>

namespace ranharness::ransim {

GnbParams GnbParams::from_spec(const config::ComponentSpec& spec) {
  GnbParams p;
  auto u32 = [&](std::string_view key, std::uint32_t& out) {
    if (spec.has_param(key)) out = static_cast<std::uint32_t>(spec.int_param(key));
  };
  u32("max_connections", p.max_connections);
  u32("rach_period_slots", p.rach_period_slots);
  u32("pdcch_candidates", p.pdcch_candidates);
  u32("pending_capacity", p.pending_capacity);
  u32("contention_timer_slots", p.contention_timer_slots);
  u32("n_rb", p.n_rb);
  if (spec.has_param("crash_on_overflow")) p.crash_on_overflow = spec.bool_param("crash_on_overflow");
  return p;
}

std::string to_string(RachResult r) {
  switch (r) {
    case RachResult::granted: return "granted";
    case RachResult::collision: return "collision";
    case RachResult::dropped: return "dropped";
  }
  return "unknown";
}

GnbState::GnbState(std::string name, GnbParams params)
    : name_(std::move(name)), params_(params) {
  if (params_.rach_period_slots == 0) throw std::invalid_argument("rach_period_slots must be > 0");
  if (params_.pdcch_candidates == 0) throw std::invalid_argument("pdcch_candidates must be > 0");
  if (params_.n_rb == 0) throw std::invalid_argument("n_rb must be > 0");
}

std::uint16_t GnbState::allocate_rnti() {
  // The space is far larger than connections + pending, so this terminates.
  while (true) {
    const std::uint16_t r = next_rnti_++;
    if (next_rnti_ == 0xFFF0) next_rnti_ = 1;
    if (r == 0 || r >= 0xFFF0) continue;
    if (connections_.count(r) || pending_.count(r)) continue;
    return r;
  }
}

std::vector<RachOutcome> GnbState::rach_occasion(std::uint64_t slot,
                                                 std::vector<RachPreamble> preambles) {
  last_overflow_ = 0;
  std::vector<RachOutcome> out;
  if (failed()) return out;

  std::sort(preambles.begin(), preambles.end(), [](const auto& a, const auto& b) {
    return a.index != b.index ? a.index < b.index : a.source < b.source;
  });
  std::map<std::uint32_t, std::size_t> per_index;
  for (const auto& p : preambles) ++per_index[p.index];

  out.reserve(preambles.size());
  for (const auto& p : preambles) {
    if (p.index >= kPreambleCount) continue;
    RachOutcome o{p.source, p.index, RachResult::dropped, 0};
    if (pending_.size() >= params_.pending_capacity) {
      ++last_overflow_;
    } else {
      o.rnti = allocate_rnti();
      pending_.emplace(o.rnti,
                       ContentionContext{p.source, p.index, slot + params_.contention_timer_slots});
      o.result = per_index[p.index] == 1 ? RachResult::granted : RachResult::collision;
    }
    out.push_back(std::move(o));
  }
  if (last_overflow_ > 0 && params_.crash_on_overflow) fail("contention overflow");
  return out;
}

AdmitResult GnbState::complete_contention(std::uint16_t rnti, const std::string& ue,
                                          std::uint64_t slot) {
  auto it = pending_.find(rnti);
  if (failed() || it == pending_.end()) return AdmitResult::unknown_rnti;
  pending_.erase(it);
  if (connections_.size() >= params_.max_connections) return AdmitResult::blocked;
  connections_.emplace(rnti, UeContext{ue, slot});
  return AdmitResult::connected;
}

void GnbState::expire(std::uint64_t slot) {
  std::erase_if(pending_, [&](const auto& kv) { return kv.second.expires_slot <= slot; });
}

bool GnbState::release(std::uint16_t rnti) { return connections_.erase(rnti) > 0; }

std::vector<std::string> GnbState::fail(std::string reason) {
  std::vector<std::string> dropped;
  for (const auto& [_, ctx] : connections_) dropped.push_back(ctx.ue);
  connections_.clear();
  pending_.clear();
  failure_ = std::move(reason);
  return dropped;
}

std::vector<std::uint16_t> GnbState::active_rntis() const {
  std::vector<std::uint16_t> out;
  out.reserve(connections_.size());
  for (const auto& [r, _] : connections_) out.push_back(r);
  return out;
}

std::vector<DciRecord> schedule_pdcch(const GnbParams& params, std::uint64_t slot,
                                      std::span<const std::uint16_t> rntis, Rng& rng) {
  std::vector<DciRecord> out;
  out.reserve(rntis.size());
  for (auto rnti : rntis) {
    DciRecord d;
    d.slot = slot;
    d.rnti = rnti;
    d.candidate = static_cast<std::uint32_t>(rng.below(params.pdcch_candidates));
    d.rb_start = static_cast<std::uint32_t>(rng.below(params.n_rb));
    d.rb_len = 1 + static_cast<std::uint32_t>(rng.below(params.n_rb - d.rb_start));
    d.mcs = static_cast<std::uint32_t>(rng.below(kMaxMcs + 1));
    out.push_back(d);
  }
  return out;
}

}  // namespace ranharness::ransim
