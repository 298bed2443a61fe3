#include "ranharness/config/plan.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ranharness::config {

std::size_t ExecutionPlan::stage_of(const std::string& name) const {
  for (std::size_t s = 0; s < stages.size(); ++s)
    if (std::find(stages[s].begin(), stages[s].end(), name) != stages[s].end()) return s;
  throw std::out_of_range("component not in plan: " + name);
}

namespace {

enum class Mark { unvisited, active, done };

// DFS along depends_on edges in declaration order. Returns the first cycle
// found, starting at the earliest-entered node on it.
std::vector<std::string> find_cycle(const ScenarioSpec& spec,
                                    const std::map<std::string, std::size_t>& index) {
  const std::size_t n = spec.components.size();
  std::vector<Mark> mark(n, Mark::unvisited);
  std::vector<std::size_t> stack;

  struct Frame {
    std::size_t node;
    std::size_t next_dep;
  };

  for (std::size_t root = 0; root < n; ++root) {
    if (mark[root] != Mark::unvisited) continue;
    std::vector<Frame> frames{{root, 0}};
    mark[root] = Mark::active;
    stack.push_back(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& deps = spec.components[f.node].depends_on;
      if (f.next_dep == deps.size()) {
        mark[f.node] = Mark::done;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      auto it = index.find(deps[f.next_dep++]);
      if (it == index.end()) continue;
      const std::size_t dep = it->second;
      if (mark[dep] == Mark::active) {
        auto begin = std::find(stack.begin(), stack.end(), dep);
        std::vector<std::string> cycle;
        for (auto s = begin; s != stack.end(); ++s) cycle.push_back(spec.components[*s].name);
        return cycle;
      }
      if (mark[dep] == Mark::unvisited) {
        mark[dep] = Mark::active;
        stack.push_back(dep);
        frames.push_back({dep, 0});
      }
    }
  }
  return {};
}

}  // namespace

PlanResult build_plan(const ScenarioSpec& spec) {
  PlanResult result;

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    if (!index.emplace(spec.components[i].name, i).second) {
      result.diagnostics.push_back(
          {"components", "duplicate component name '" + spec.components[i].name + "'", 0, 0});
      return result;
    }
  }
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    for (const auto& d : spec.components[i].depends_on) {
      if (!index.count(d)) {
        result.diagnostics.push_back({"components[" + std::to_string(i) + "].depends_on",
                                      "unknown component '" + d + "'", 0, 0});
      }
    }
  }
  if (!result.diagnostics.empty()) return result;

  result.cycle = find_cycle(spec, index);
  if (!result.cycle.empty()) {
    std::string text;
    for (const auto& c : result.cycle) text += c + " -> ";
    text += result.cycle.front();
    result.diagnostics.push_back({"components", "dependency cycle: " + text, 0, 0});
    return result;
  }

  // Longest-path layering; with no cycles one pass per level suffices.
  const std::size_t n = spec.components.size();
  std::vector<std::size_t> level(n, 0);
  std::vector<bool> placed(n, false);
  std::size_t remaining = n;
  std::size_t max_level = 0;
  while (remaining > 0) {
    bool progress = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      std::size_t lvl = 0;
      bool ready = true;
      for (const auto& d : spec.components[i].depends_on) {
        const std::size_t j = index.at(d);
        if (!placed[j]) {
          ready = false;
          break;
        }
        lvl = std::max(lvl, level[j] + 1);
      }
      if (!ready) continue;
      level[i] = lvl;
      placed[i] = true;
      max_level = std::max(max_level, lvl);
      --remaining;
      progress = true;
    }
    if (!progress) throw std::logic_error("build_plan: unresolved dependencies without a cycle");
  }

  ExecutionPlan plan;
  plan.stages.resize(n == 0 ? 0 : max_level + 1);
  for (std::size_t i = 0; i < n; ++i) plan.stages[level[i]].push_back(spec.components[i].name);
  plan.spec = spec;
  result.value = std::move(plan);
  return result;
}

}  // namespace ranharness::config
