#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ranharness/common/rng.hpp"
#include "ranharness/config/scenario.hpp"
#include "ranharness/metrics/point.hpp"
#include "ranharness/ransim/gnb.hpp"
#include "ranharness/ransim/rlf.hpp"

namespace ranharness::ransim {

// Commands a participant may emit. They take effect in the slot they are
// emitted in.

/// Radiate tx_dbm from position_m (gNB at 0) for the current slot.
struct TransmitCommand {
  double tx_dbm = 0;
  double position_m = 0;
};

/// Send a RACH preamble. Only meaningful at an occasion. The tag separates
/// several preambles from one source.
struct PreambleCommand {
  std::uint32_t index = 0;
  std::string tag;
};

/// Deliver an uplink CCCH SDU to the gNB.
struct RrcCommand {
  std::vector<std::uint8_t> sdu;
};

using Command = std::variant<TransmitCommand, PreambleCommand, RrcCommand>;

struct IssuedCommand {
  std::string source;
  Command command;
};

class CommandSink {
 public:
  CommandSink(std::string source, std::vector<IssuedCommand>& queue)
      : source_(std::move(source)), queue_(queue) {}

  void transmit(double tx_dbm, double position_m) {
    queue_.push_back({source_, TransmitCommand{tx_dbm, position_m}});
  }
  void preamble(std::uint32_t index, std::string tag = {}) {
    queue_.push_back({source_, PreambleCommand{index, std::move(tag)}});
  }
  void rrc(std::vector<std::uint8_t> sdu) { queue_.push_back({source_, RrcCommand{std::move(sdu)}}); }

 private:
  std::string source_;
  std::vector<IssuedCommand>& queue_;
};

struct Transmission {
  std::string source;
  double tx_dbm = 0;
  double position_m = 0;
  /// Attacker emissions interfere with every uplink; UE uplinks do not.
  bool interferer = false;
};

struct RrcDelivery {
  std::string source;
  bool accepted = false;
  std::string reason;
};

struct LinkSample {
  std::string ue;
  std::uint16_t rnti = 0;
  double rx_dbm = 0;
  /// Linear sum of interference at the gNB, absent when nothing interferes.
  std::optional<double> interference_dbm;
  double sinr_db = 0;
};

enum class UeEventKind { connected, blocked, released, dropped };

struct UeEvent {
  UeEventKind kind = UeEventKind::connected;
  std::string ue;
  std::uint16_t rnti = 0;
};

std::string to_string(UeEventKind k);

/// Everything that happened in one slot.
struct SlotEvents {
  std::uint64_t slot = 0;
  bool rach_occasion = false;
  std::vector<Transmission> transmissions;
  std::vector<RachOutcome> rach;
  std::size_t rach_overflow = 0;
  std::vector<RrcDelivery> rrc;
  std::vector<DciRecord> dci;
  std::vector<LinkSample> links;
  std::vector<UeEvent> ue_events;
  std::optional<std::string> gnb_failure;
};

class SimEngine;

struct SlotContext {
  std::uint64_t slot = 0;
  /// Events of slot - 1; null before the first slot.
  const SlotEvents* previous = nullptr;
  const SimEngine& view;
  CommandSink& commands;
  /// Set for the closing call after the last slot; commands are ignored.
  bool final = false;
};

/// Anything that acts inside the slot loop. Components see the simulation
/// only through the context and act on it only through emitted commands.
class SlotParticipant {
 public:
  virtual ~SlotParticipant() = default;
  virtual void on_slot(const SlotContext& ctx) = 0;
};

enum class UeState { idle, granted, connected, released };

struct UeView {
  std::string name;
  double position_m = 0;
  UeState state = UeState::idle;
  std::uint16_t rnti = 0;
  std::uint32_t rach_attempts = 0;
};

/// Discrete-slot simulation of one gNB, its UEs and the attack participants.
/// Single-threaded; determinism depends only on the seed and the sequence
/// of calls.
class SimEngine {
 public:
  SimEngine(config::ChannelSpec channel, std::uint64_t seed);
  ~SimEngine();

  void add_gnb(const config::ComponentSpec& spec);
  void add_ue(const config::ComponentSpec& spec);
  /// Removes a UE, releasing its connection.
  void remove_ue(const std::string& name);

  /// order fixes the position in the per-slot call sequence (lower first).
  void attach(const std::string& name, std::size_t order, SlotParticipant* participant);
  void detach(const std::string& name);

  /// Engine-native entities (gNB, UEs) emit their metrics here.
  void set_writer(const std::string& component, metrics::PointWriter* writer);
  void set_trace(std::ostream* trace) { trace_ = trace; }

  /// Runs the current slot and advances the clock by one.
  const SlotEvents& step();
  /// Shows the last slot's events to the participants; their commands are
  /// discarded.
  void finish();

  std::uint64_t slot() const { return slot_; }
  std::uint64_t digest() const { return digest_; }
  const config::ChannelSpec& channel() const { return channel_; }
  const GnbState* gnb() const { return gnb_.get(); }
  std::vector<UeView> ues() const;
  std::optional<UeView> ue(const std::string& name) const;

  /// Fails the gNB at the start of the next slot.
  void fail_gnb(const std::string& reason);
  /// Replaces a failed gNB with a fresh instance of the same spec.
  void restart_gnb(std::uint64_t seed);

 private:
  struct Ue;
  struct Participant {
    std::string name;
    std::size_t order;
    SlotParticipant* participant;
  };

  void run_participants(std::uint64_t slot, const SlotEvents* previous,
                        std::vector<IssuedCommand>& out, bool final);
  void drop_connections(SlotEvents& ev, const std::vector<std::string>& dropped);
  void emit_metrics(const SlotEvents& ev);
  void record(const SlotEvents& ev);
  void write(const std::string& component, metrics::MetricPoint p);

  config::ChannelSpec channel_;
  std::uint64_t seed_;
  std::uint64_t slot_ = 0;
  std::uint64_t digest_;
  std::optional<config::ComponentSpec> gnb_spec_;
  std::unique_ptr<GnbState> gnb_;
  std::unique_ptr<Rng> gnb_rng_;
  std::vector<std::unique_ptr<Ue>> ues_;
  std::vector<Participant> participants_;
  std::map<std::string, metrics::PointWriter*> writers_;
  std::ostream* trace_ = nullptr;
  std::optional<std::string> deferred_failure_;
  SlotEvents last_;
  bool has_last_ = false;
};

}  // namespace ranharness::ransim
