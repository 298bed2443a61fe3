#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranharness/common/rng.hpp"
#include "ranharness/config/scenario.hpp"

namespace ranharness::ransim {

inline constexpr std::uint32_t kPreambleCount = 64;
inline constexpr std::uint32_t kMaxMcs = 28;

struct GnbParams {
  std::uint32_t max_connections = 32;
  std::uint32_t rach_period_slots = 10;
  std::uint32_t pdcch_candidates = 16;
  std::uint32_t pending_capacity = 128;
  std::uint32_t contention_timer_slots = 8;
  std::uint32_t n_rb = 52;
  bool crash_on_overflow = false;

  static GnbParams from_spec(const config::ComponentSpec& spec);
};

struct RachPreamble {
  std::uint64_t occasion = 0;
  std::uint32_t index = 0;
  std::string source;
};

enum class RachResult { granted, collision, dropped };

std::string to_string(RachResult r);

struct RachOutcome {
  std::string source;
  std::uint32_t index = 0;
  RachResult result = RachResult::dropped;
  /// Temporary identity of the contention context; 0 when dropped.
  std::uint16_t rnti = 0;
};

struct DciRecord {
  std::uint64_t slot = 0;
  std::uint16_t rnti = 0;
  std::uint32_t candidate = 0;
  std::uint32_t rb_start = 0;
  std::uint32_t rb_len = 0;
  std::uint32_t mcs = 0;

  bool operator==(const DciRecord&) const = default;
};

struct UeContext {
  std::string ue;
  std::uint64_t connected_slot = 0;
};

struct ContentionContext {
  std::string source;
  std::uint32_t index = 0;
  std::uint64_t expires_slot = 0;
};

enum class AdmitResult { connected, blocked, unknown_rnti };

/// Base-station state: contention contexts opened by RACH, and connected UEs.
class GnbState {
 public:
  GnbState(std::string name, GnbParams params);

  const std::string& name() const { return name_; }
  const GnbParams& params() const { return params_; }

  bool failed() const { return failure_.has_value(); }
  const std::optional<std::string>& failure() const { return failure_; }

  const std::map<std::uint16_t, UeContext>& connections() const { return connections_; }
  const std::map<std::uint16_t, ContentionContext>& pending() const { return pending_; }

  bool is_occasion(std::uint64_t slot) const { return slot % params_.rach_period_slots == 0; }

  /// Every preamble opens one contention context, processed in (index,
  /// source) order. An index chosen by a single source is granted; a shared
  /// index is a collision for all its sources. Once pending_capacity contexts
  /// are open, further preambles are dropped; with crash_on_overflow the gNB
  /// fails at that point.
  std::vector<RachOutcome> rach_occasion(std::uint64_t slot, std::vector<RachPreamble> preambles);

  /// Number of preambles dropped for lack of capacity at the last occasion.
  std::size_t last_overflow() const { return last_overflow_; }

  /// Completes contention for a granted context (UE Msg3 received).
  AdmitResult complete_contention(std::uint16_t rnti, const std::string& ue, std::uint64_t slot);

  /// Drops contention contexts whose timer has run out.
  void expire(std::uint64_t slot);

  bool release(std::uint16_t rnti);

  /// Marks the gNB failed and clears all state. Returns the UEs that were
  /// connected.
  std::vector<std::string> fail(std::string reason);

  std::vector<std::uint16_t> active_rntis() const;

 private:
  std::uint16_t allocate_rnti();

  std::string name_;
  GnbParams params_;
  std::map<std::uint16_t, UeContext> connections_;
  std::map<std::uint16_t, ContentionContext> pending_;
  std::optional<std::string> failure_;
  std::uint16_t next_rnti_ = 0x4601;
  std::size_t last_overflow_ = 0;
};

/// One DCI per rnti, in the order given, each with an independent uniform
/// PDCCH candidate and a random grant.
std::vector<DciRecord> schedule_pdcch(const GnbParams& params, std::uint64_t slot,
                                      std::span<const std::uint16_t> rntis, Rng& rng);

}  // namespace ranharness::ransim
