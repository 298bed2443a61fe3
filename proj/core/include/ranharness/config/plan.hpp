#pragma once

#include <string>
#include <vector>

#include "ranharness/common/diagnostic.hpp"
#include "ranharness/config/scenario.hpp"

namespace ranharness::config {

/// Topologically layered startup order. Stage k holds the components whose
/// dependencies all sit in stages < k, in declaration order.
struct ExecutionPlan {
  std::vector<std::vector<std::string>> stages;
  ScenarioSpec spec;

  std::size_t stage_of(const std::string& name) const;
};

struct PlanResult : Checked<ExecutionPlan> {
  /// Component names along the detected cycle, in dependency order.
  std::vector<std::string> cycle;
};

PlanResult build_plan(const ScenarioSpec& spec);

}  // namespace ranharness::config
