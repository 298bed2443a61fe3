#include "ranharness/attacks/simulation.hpp"

#include <stdexcept>

#include "ranharness/config/seed.hpp"

namespace ranharness::attacks {

ScenarioSimulation::ScenarioSimulation(config::ScenarioSpec spec, const Registry& registry,
                                       std::filesystem::path artifact_dir)
    : spec_(std::move(spec)), engine_(spec_.channel, spec_.seed) {
  for (std::size_t i = 0; i < spec_.components.size(); ++i) {
    const auto& c = spec_.components[i];
    auto& writer = writers_[c.name];
    writer = std::make_unique<metrics::StoreWriter>(store_, c.name);
    if (c.kind == config::kinds::gnb) {
      engine_.add_gnb(c);
      engine_.set_writer(c.name, writer.get());
      continue;
    }
    if (c.kind == config::kinds::ue) {
      engine_.add_ue(c);
      engine_.set_writer(c.name, writer.get());
      continue;
    }
    auto component = registry.create(c.kind);
    if (!component) throw std::runtime_error("no factory for kind '" + c.kind + "'");
    InitContext ctx{c, spec_, config::derive_component_seed(spec_.seed, c.name), writer.get(),
                    artifact_dir};
    if (auto err = component->init(ctx)) throw std::runtime_error(c.name + ": " + *err);
    engine_.attach(c.name, i, component.get());
    components_.emplace(c.name, std::move(component));
  }
}

ScenarioSimulation::~ScenarioSimulation() {
  for (auto& [_, c] : components_) c->stop();
}

const ransim::SlotEvents& ScenarioSimulation::step() { return engine_.step(); }

void ScenarioSimulation::finish() {
  if (finished_) return;
  finished_ = true;
  engine_.finish();
  for (auto& [_, c] : components_) c->stop();
}

void ScenarioSimulation::run() {
  while (engine_.slot() < spec_.duration_slots) engine_.step();
  finish();
}

Component* ScenarioSimulation::component(const std::string& name) const {
  auto it = components_.find(name);
  return it == components_.end() ? nullptr : it->second.get();
}

}  // namespace ranharness::attacks
