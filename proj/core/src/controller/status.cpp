#include "ranharness/controller/status.hpp"

namespace ranharness::controller {

std::string to_string(State s) {
  switch (s) {
    case State::Pending: return "Pending";
    case State::Starting: return "Starting";
    case State::Running: return "Running";
    case State::Degraded: return "Degraded";
    case State::Stopped: return "Stopped";
    case State::Failed: return "Failed";
  }
  return "Unknown";
}

std::optional<State> parse_state(const std::string& s) {
  for (auto st : {State::Pending, State::Starting, State::Running, State::Degraded, State::Stopped,
                  State::Failed})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

bool legal_transition(State from, State to) {
  switch (from) {
    case State::Pending:
      // Stopped covers a run torn down before the component's stage began.
      return to == State::Starting || to == State::Stopped;
    case State::Starting:
      return to == State::Running || to == State::Failed;
    case State::Running:
      return to == State::Degraded || to == State::Stopped || to == State::Failed;
    case State::Degraded:
      return to == State::Running || to == State::Failed || to == State::Stopped;
    case State::Failed:
      return to == State::Starting;
    case State::Stopped:
      return false;
  }
  return false;
}

}  // namespace ranharness::controller
