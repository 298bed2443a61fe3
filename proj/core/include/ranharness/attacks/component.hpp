#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ranharness/config/scenario.hpp"
#include "ranharness/metrics/point.hpp"
#include "ranharness/ransim/engine.hpp"

namespace ranharness::attacks {

struct InitContext {
  const config::ComponentSpec& spec;
  const config::ScenarioSpec& scenario;
  std::uint64_t seed = 0;
  /// May be null, in which case the component records nothing.
  metrics::PointWriter* metrics = nullptr;
  /// Where artifacts go; empty disables them.
  std::filesystem::path artifact_dir;
};

/// Uniform interface for attack components. init runs once before any
/// on_slot; stop may be called any number of times. A component affects the
/// simulation only through the commands it emits from on_slot.
class Component : public ransim::SlotParticipant {
 public:
  /// Returns an error message when the component cannot start.
  virtual std::optional<std::string> init(const InitContext& ctx) = 0;
  virtual void stop() {}
};

}  // namespace ranharness::attacks
