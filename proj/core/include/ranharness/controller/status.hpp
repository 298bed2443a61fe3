#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ranharness::controller {

enum class State { Pending, Starting, Running, Degraded, Stopped, Failed };

std::string to_string(State s);
std::optional<State> parse_state(const std::string& s);

/// Edges of the component lifecycle graph.
bool legal_transition(State from, State to);

struct ComponentStatus {
  State state = State::Pending;
  /// Always set when Failed; also explains a component left Pending.
  std::optional<std::string> reason;
  std::int64_t last_heartbeat_ns = 0;
  std::uint32_t restarts = 0;
  std::uint64_t heartbeats = 0;
};

struct Transition {
  std::string component;
  State from = State::Pending;
  State to = State::Pending;
  std::optional<std::string> reason;
  /// Strictly increasing across the run.
  std::int64_t ts_ns = 0;
  std::uint64_t seq = 0;
};

}  // namespace ranharness::controller
