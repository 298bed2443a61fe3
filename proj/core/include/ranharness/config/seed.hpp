#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ranharness::config {

/// FNV-1a 64 over the big-endian bytes of scenario_seed followed by the UTF-8
/// bytes of name.
std::uint64_t derive_component_seed(std::uint64_t scenario_seed, std::string_view name);

/// Seed for the given restart generation: the plain name for the first start,
/// "name#restarts" afterwards.
std::uint64_t restart_seed(std::uint64_t scenario_seed, std::string_view name,
                           std::uint32_t restarts);

}  // namespace ranharness::config
