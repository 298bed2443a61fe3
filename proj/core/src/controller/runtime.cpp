#include "ranharness/controller/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

namespace ranharness::controller {

class ScenarioRuntime::SimRunner final : public Runner {
 public:
  SimRunner(ScenarioRuntime& rt, const config::ComponentSpec& spec) : rt_(rt), spec_(spec) {}

  std::optional<std::string> start(const RunnerContext& ctx) override {
    const std::size_t order = rt_.order_of(spec_.name);
    if (spec_.kind == config::kinds::gnb) {
      rt_.session_for(spec_.name);
      rt_.post({ctx.restarts == 0 ? OpKind::add_gnb : OpKind::restart_gnb, spec_.name, order,
                ctx.seed, nullptr});
      return std::nullopt;
    }
    if (spec_.kind == config::kinds::ue) {
      rt_.session_for(spec_.name);
      rt_.post({OpKind::add_ue, spec_.name, order, ctx.seed, nullptr});
      return std::nullopt;
    }
    auto component = rt_.registry_.create(spec_.kind);
    if (!component) return "no factory for kind '" + spec_.kind + "'";
    attacks::InitContext init{spec_, rt_.spec_, ctx.seed, rt_.session_for(spec_.name),
                              rt_.options_.artifact_dir};
    if (auto err = component->init(init)) return "bad params: " + *err;
    attacks::Component* raw = component.get();
    {
      std::lock_guard lock(rt_.mu_);
      rt_.components_.push_back(std::move(component));
    }
    rt_.post({OpKind::attach, spec_.name, order, 0, raw});
    return std::nullopt;
  }

  void stop() override {
    if (spec_.kind == config::kinds::gnb) return;
    rt_.post({spec_.kind == config::kinds::ue ? OpKind::remove_ue : OpKind::detach, spec_.name,
              rt_.order_of(spec_.name), 0, nullptr});
  }

 private:
  ScenarioRuntime& rt_;
  const config::ComponentSpec& spec_;
};

ScenarioRuntime::ScenarioRuntime(config::ScenarioSpec spec, RuntimeOptions options)
    : spec_(std::move(spec)),
      options_(std::move(options)),
      registry_(options_.registry ? *options_.registry : attacks::Registry::builtin()),
      hub_(options_.metrics_queue),
      engine_(spec_.channel, spec_.seed) {
  engine_.set_trace(options_.trace);
  digest_ = engine_.digest();
}

ScenarioRuntime::~ScenarioRuntime() {
  try {
    finalize();
  } catch (...) {
  }
}

std::unique_ptr<Runner> ScenarioRuntime::make(const config::ComponentSpec& spec) {
  return std::make_unique<SimRunner>(*this, spec);
}

std::size_t ScenarioRuntime::order_of(const std::string& name) const {
  return spec_.index_of(name).value_or(spec_.components.size());
}

metrics::PointWriter* ScenarioRuntime::session_for(const std::string& component) {
  std::lock_guard lock(mu_);
  auto& s = sessions_[component];
  if (!s) s = hub_.open_session(component);
  return s.get();
}

void ScenarioRuntime::post(Op op) {
  std::lock_guard lock(mu_);
  inbox_.push_back(std::move(op));
}

void ScenarioRuntime::detach_component(const std::string& name) {
  auto it = attached_.find(name);
  if (it == attached_.end()) return;
  engine_.detach(name);
  it->second->stop();
  attached_.erase(it);
}

// Runs on the simulation thread only.
void ScenarioRuntime::apply_ops() {
  std::vector<Op> ops;
  {
    std::lock_guard lock(mu_);
    ops.swap(inbox_);
  }
  // Workers of one stage start concurrently; declaration order keeps the
  // result independent of thread timing.
  std::stable_sort(ops.begin(), ops.end(), [](const Op& a, const Op& b) { return a.order < b.order; });
  for (const auto& op : ops) {
    metrics::PointWriter* writer = nullptr;
    {
      std::lock_guard lock(mu_);
      auto it = sessions_.find(op.name);
      if (it != sessions_.end()) writer = it->second.get();
    }
    const auto* spec = spec_.find(op.name);
    switch (op.kind) {
      case OpKind::add_gnb:
        engine_.add_gnb(*spec);
        engine_.set_writer(op.name, writer);
        break;
      case OpKind::restart_gnb:
        engine_.restart_gnb(op.seed);
        break;
      case OpKind::add_ue:
        engine_.remove_ue(op.name);
        engine_.add_ue(*spec);
        engine_.set_writer(op.name, writer);
        break;
      case OpKind::remove_ue:
        engine_.remove_ue(op.name);
        engine_.set_writer(op.name, nullptr);
        break;
      case OpKind::attach:
        detach_component(op.name);
        engine_.attach(op.name, op.order, op.component);
        attached_[op.name] = op.component;
        break;
      case OpKind::detach:
        detach_component(op.name);
        break;
    }
  }
}

void ScenarioRuntime::run(RunControl& control) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto slot_len = std::chrono::microseconds(spec_.slot_us);

  control.log("sim", LogLevel::info, "slot loop started", engine_.slot());
  while (engine_.slot() < spec_.duration_slots && !stop_) {
    apply_ops();
    const std::uint64_t t = engine_.slot();
    for (const auto& k : options_.kills) {
      if (k.slot != t) continue;
      const auto* spec = spec_.find(k.component);
      if (!spec) continue;
      if (spec->kind == config::kinds::gnb)
        engine_.fail_gnb("killed by fault injection");
      else if (spec->kind == config::kinds::ue)
        engine_.remove_ue(k.component);
      else
        detach_component(k.component);
      control.report_failure(k.component, "killed by fault injection");
    }
    const auto& ev = engine_.step();
    if (ev.gnb_failure && engine_.gnb()) {
      control.log(engine_.gnb()->name(), LogLevel::error, "gnb failed: " + *ev.gnb_failure, t);
      control.report_failure(engine_.gnb()->name(), *ev.gnb_failure);
    }
    for (const auto& e : ev.ue_events) {
      if (e.kind == ransim::UeEventKind::connected || e.kind == ransim::UeEventKind::released)
        control.log(e.ue, LogLevel::info, ransim::to_string(e.kind) + " rnti " + std::to_string(e.rnti), t);
    }
    digest_ = engine_.digest();
    slots_run_ = engine_.slot();
    if (spec_.realtime) std::this_thread::sleep_until(t0 + slot_len * engine_.slot());
  }
  engine_.finish();
  completed_ = engine_.slot() >= spec_.duration_slots;
  control.log("sim", LogLevel::info,
              completed_ ? "slot loop completed" : "slot loop interrupted", engine_.slot());
}

void ScenarioRuntime::finalize() {
  if (finalized_) return;
  finalized_ = true;
  std::vector<std::unique_ptr<attacks::Component>> components;
  {
    std::lock_guard lock(mu_);
    components.swap(components_);
  }
  for (auto& c : components) c->stop();
  hub_.close_all();
}

}  // namespace ranharness::controller
