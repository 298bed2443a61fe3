#include "ranharness/config/seed.hpp"

#include "ranharness/common/fnv.hpp"

namespace ranharness::config {

std::uint64_t derive_component_seed(std::uint64_t scenario_seed, std::string_view name) {
  Fnv1a64 h;
  for (int shift = 56; shift >= 0; shift -= 8)
    h.byte(static_cast<std::uint8_t>(scenario_seed >> shift));
  h.update(name);
  return h.value();
}

std::uint64_t restart_seed(std::uint64_t scenario_seed, std::string_view name,
                           std::uint32_t restarts) {
  if (restarts == 0) return derive_component_seed(scenario_seed, name);
  std::string tagged(name);
  tagged += '#';
  tagged += std::to_string(restarts);
  return derive_component_seed(scenario_seed, tagged);
}

}  // namespace ranharness::config
