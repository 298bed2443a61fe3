#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>

#include "ranharness/attacks/registry.hpp"
#include "ranharness/metrics/store.hpp"
#include "ranharness/ransim/engine.hpp"

namespace ranharness::attacks {

/// Whole scenario in one thread with no supervision: the engine, every
/// component, and a metrics store written synchronously. Same slot semantics
/// and seeds as a supervised run.
class ScenarioSimulation {
 public:
  /// Throws std::runtime_error when a component fails to initialise.
  explicit ScenarioSimulation(config::ScenarioSpec spec,
                              const Registry& registry = Registry::builtin(),
                              std::filesystem::path artifact_dir = {});
  ~ScenarioSimulation();

  /// Runs the remaining slots, shows the final slot to observers and stops
  /// every component.
  void run();
  const ransim::SlotEvents& step();
  void finish();

  ransim::SimEngine& engine() { return engine_; }
  const metrics::MetricsStore& store() const { return store_; }
  const config::ScenarioSpec& spec() const { return spec_; }

  Component* component(const std::string& name) const;
  template <class T>
  T* component_as(const std::string& name) const {
    return dynamic_cast<T*>(component(name));
  }

 private:
  config::ScenarioSpec spec_;
  metrics::MetricsStore store_;
  std::map<std::string, std::unique_ptr<metrics::StoreWriter>> writers_;
  std::map<std::string, std::unique_ptr<Component>> components_;
  ransim::SimEngine engine_;
  bool finished_ = false;
};

}  // namespace ranharness::attacks
