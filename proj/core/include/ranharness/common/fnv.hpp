#pragma once

#include <cstdint>
#include <string_view>

namespace ranharness {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// Incremental FNV-1a 64.
class Fnv1a64 {
 public:
  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= kFnvPrime;
  }
  void update(std::string_view s) {
    for (unsigned char c : s) byte(c);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = kFnvOffset;
};

}  // namespace ranharness
