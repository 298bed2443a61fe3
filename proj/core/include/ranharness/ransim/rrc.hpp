#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ranharness::ransim {

inline constexpr std::uint8_t kSetupRequestType = 0x01;
inline constexpr std::size_t kSetupRequestBytes = 7;
inline constexpr int kIdentityBits = 39;
inline constexpr std::uint64_t kMaxIdentity = (std::uint64_t{1} << kIdentityBits) - 1;

struct RrcSetupRequest {
  std::uint64_t ue_identity = 0;
  std::uint8_t establishment_cause = 0;

  bool operator==(const RrcSetupRequest&) const = default;
};

enum class RrcReject { bad_length, bad_type, bad_cause, bad_spare };

std::string to_string(RrcReject r);

using DecodeResult = std::variant<RrcSetupRequest, RrcReject>;

/// Bit layout, MSB first: [0,8) type, [8,47) identity, [47,51) cause,
/// [51,56) spare. Throws std::invalid_argument for an out-of-range field.
std::vector<std::uint8_t> encode_setup_request(const RrcSetupRequest& msg);

/// Accepts iff the buffer is 7 bytes, type is 0x01, cause <= 7 and spare is
/// zero. The first failing check is the one reported.
DecodeResult decode_setup_request(std::span<const std::uint8_t> buffer);

}  // namespace ranharness::ransim
