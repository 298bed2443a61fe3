#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "ranharness/attacks/registry.hpp"
#include "ranharness/controller/controller.hpp"
#include "ranharness/metrics/hub.hpp"
#include "ranharness/ransim/engine.hpp"

namespace ranharness::controller {

struct KillAt {
  std::string component;
  std::uint64_t slot = 0;
};

struct RuntimeOptions {
  /// Artifact directory handed to components; empty disables artifacts.
  std::filesystem::path artifact_dir;
  /// Optional NDJSON event trace.
  std::ostream* trace = nullptr;
  std::vector<KillAt> kills;
  std::size_t metrics_queue = 4096;
  const attacks::Registry* registry = nullptr;
};

/// Hosts a scenario under the controller: each component's runner attaches
/// it to the shared simulation, and the workload drives the slot loop on the
/// controller thread. Attach and detach requests from workers take effect
/// at the next slot boundary.
class ScenarioRuntime final : public RunnerFactory, public Workload {
 public:
  ScenarioRuntime(config::ScenarioSpec spec, RuntimeOptions options = {});
  ~ScenarioRuntime() override;

  std::unique_ptr<Runner> make(const config::ComponentSpec& spec) override;
  void run(RunControl& control) override;
  void request_stop() override { stop_ = true; }
  void finalize() override;

  const metrics::MetricsStore& store() const { return hub_.store(); }
  std::uint64_t digest() const { return digest_.load(); }
  std::uint64_t slots_run() const { return slots_run_.load(); }
  bool completed() const { return completed_.load(); }

 private:
  class SimRunner;
  enum class OpKind { add_gnb, restart_gnb, add_ue, remove_ue, attach, detach };
  struct Op {
    OpKind kind;
    std::string name;
    std::size_t order = 0;
    std::uint64_t seed = 0;
    attacks::Component* component = nullptr;
  };

  void post(Op op);
  void apply_ops();
  void detach_component(const std::string& name);
  metrics::PointWriter* session_for(const std::string& component);
  std::size_t order_of(const std::string& name) const;

  config::ScenarioSpec spec_;
  RuntimeOptions options_;
  const attacks::Registry& registry_;
  metrics::MetricsHub hub_;
  ransim::SimEngine engine_;

  std::mutex mu_;
  std::vector<Op> inbox_;
  std::map<std::string, std::shared_ptr<metrics::Session>> sessions_;
  std::vector<std::unique_ptr<attacks::Component>> components_;

  /// Sim-thread view of which component instance is attached per name.
  std::map<std::string, attacks::Component*> attached_;

  std::atomic<bool> stop_{false};
  std::atomic<bool> completed_{false};
  std::atomic<std::uint64_t> digest_{0};
  std::atomic<std::uint64_t> slots_run_{0};
  bool finalized_ = false;
};

}  // namespace ranharness::controller
