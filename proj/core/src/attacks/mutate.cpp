#include "ranharness/attacks/mutate.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace ranharness::attacks {

std::vector<std::uint8_t> flip_bits(std::span<const std::uint8_t> buffer, std::size_t k, Rng& rng) {
  const std::size_t bits = buffer.size() * 8;
  if (k > bits)
    throw std::invalid_argument("cannot flip " + std::to_string(k) + " bits of a " +
                                std::to_string(bits) + "-bit buffer");
  std::vector<std::uint8_t> out(buffer.begin(), buffer.end());
  std::vector<std::size_t> pos(bits);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(bits - i);
    std::swap(pos[i], pos[j]);
    out[pos[i] / 8] ^= static_cast<std::uint8_t>(0x80u >> (pos[i] % 8));
  }
  return out;
}

}  // namespace ranharness::attacks
