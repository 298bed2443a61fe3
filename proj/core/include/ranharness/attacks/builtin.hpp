#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranharness/attacks/component.hpp"
#include "ranharness/common/rng.hpp"

namespace ranharness::attacks {

/// Continuous interferer radiating gain_db (over a 0 dBm base) from
/// distance_m while start_slot <= slot <= stop_slot.
class Jammer final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override;
  void on_slot(const ransim::SlotContext& ctx) override;

  bool active_at(std::uint64_t slot) const;

 private:
  metrics::PointWriter* metrics_ = nullptr;
  double gain_db_ = 0;
  double distance_m_ = 0;
  std::uint64_t start_ = 0;
  std::optional<std::uint64_t> stop_;
};

/// Sends `attempts` bit-flipped RRC setup requests to the target gNB, one per
/// slot, and records whether each was accepted.
class RrcFuzzer final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override;
  void on_slot(const ransim::SlotContext& ctx) override;

  std::uint32_t sent() const { return sent_; }
  std::uint32_t resolved() const { return resolved_; }
  std::uint32_t successes() const { return successes_; }

 private:
  struct InFlight {
    std::uint64_t slot;
    std::uint64_t mask;
  };

  std::string name_;
  std::string target_;
  metrics::PointWriter* metrics_ = nullptr;
  std::optional<Rng> rng_;
  std::uint32_t k_ = 0;
  std::uint32_t attempts_ = 0;
  std::uint32_t sent_ = 0;
  std::uint32_t resolved_ = 0;
  std::uint32_t successes_ = 0;
  std::optional<InFlight> in_flight_;
};

/// Sends preambles_per_occasion random preambles at every RACH occasion
/// while active.
class RachFlooder final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override;
  void on_slot(const ransim::SlotContext& ctx) override;

  std::uint64_t preambles_sent() const { return sent_; }

 private:
  std::string name_;
  metrics::PointWriter* metrics_ = nullptr;
  std::optional<Rng> rng_;
  std::uint32_t per_occasion_ = 0;
  std::uint64_t start_ = 0;
  std::optional<std::uint64_t> stop_;
  std::uint64_t sent_ = 0;
};

/// Passive PDCCH observer. A DCI is captured when no other DCI in the same
/// slot used its candidate.
class DciSniffer final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override;
  void on_slot(const ransim::SlotContext& ctx) override;

  std::uint64_t seen() const { return seen_; }
  std::uint64_t captured() const { return captured_; }
  const std::map<std::uint16_t, std::uint64_t>& per_rnti() const { return per_rnti_; }
  std::set<std::uint16_t> rntis() const;

 private:
  std::string target_;
  metrics::PointWriter* metrics_ = nullptr;
  std::uint64_t seen_ = 0;
  std::uint64_t captured_ = 0;
  std::map<std::uint16_t, std::uint64_t> per_rnti_;
};

struct IqSample {
  std::uint64_t slot = 0;
  std::string source;
  double power_dbm = 0;
};

/// B consecutive slots of received power, one column per source.
struct IqBurst {
  std::uint64_t start_slot = 0;
  std::vector<std::uint64_t> slots;
  std::vector<std::string> sources;
  /// power[i][j]: slot i, source j. A source silent in a slot reads as the
  /// noise floor.
  std::vector<std::vector<double>> power;
};

/// Records per-source received power at its position for burst_len slots out
/// of every period.
class IqCollector final : public Component {
 public:
  std::optional<std::string> init(const InitContext& ctx) override;
  void on_slot(const ransim::SlotContext& ctx) override;
  void stop() override;

  const std::vector<IqSample>& samples() const { return samples_; }
  std::vector<IqBurst> bursts() const;
  /// Rows in the artifact: one per (slot, source) sample.
  std::size_t rows() const;

 private:
  metrics::PointWriter* metrics_ = nullptr;
  std::uint64_t burst_len_ = 1;
  std::uint64_t period_ = 1;
  double position_m_ = 0;
  double noise_dbm_ = -94;
  std::vector<IqSample> samples_;
  std::ofstream artifact_;
};

}  // namespace ranharness::attacks
