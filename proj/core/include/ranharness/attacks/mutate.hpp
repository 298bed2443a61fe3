#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ranharness/common/rng.hpp"

namespace ranharness::attacks {

/// Inverts exactly k distinct, uniformly chosen bits. Bit 0 is the MSB of
/// byte 0. k == 0 returns the input unchanged; k larger than the bit length
/// throws std::invalid_argument.
std::vector<std::uint8_t> flip_bits(std::span<const std::uint8_t> buffer, std::size_t k, Rng& rng);

}  // namespace ranharness::attacks
