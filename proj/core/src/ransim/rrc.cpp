#include "ranharness/ransim/rrc.hpp"

#include <stdexcept>

namespace ranharness::ransim {

std::string to_string(RrcReject r) {
  switch (r) {
    case RrcReject::bad_length: return "bad_length";
    case RrcReject::bad_type: return "bad_type";
    case RrcReject::bad_cause: return "bad_cause";
    case RrcReject::bad_spare: return "bad_spare";
  }
  return "unknown";
}

// The 56-bit message is handled as one integer with bit 0 of the layout in
// position 55.
std::vector<std::uint8_t> encode_setup_request(const RrcSetupRequest& msg) {
  if (msg.ue_identity > kMaxIdentity)
    throw std::invalid_argument("ue_identity exceeds 39 bits");
  if (msg.establishment_cause > 7) throw std::invalid_argument("establishment_cause exceeds 7");

  std::uint64_t word = std::uint64_t{kSetupRequestType} << 48;
  word |= msg.ue_identity << 9;
  word |= std::uint64_t{msg.establishment_cause} << 5;

  std::vector<std::uint8_t> out(kSetupRequestBytes);
  for (std::size_t i = 0; i < kSetupRequestBytes; ++i)
    out[i] = static_cast<std::uint8_t>(word >> (8 * (kSetupRequestBytes - 1 - i)));
  return out;
}

DecodeResult decode_setup_request(std::span<const std::uint8_t> buffer) {
  if (buffer.size() != kSetupRequestBytes) return RrcReject::bad_length;
  std::uint64_t word = 0;
  for (auto b : buffer) word = (word << 8) | b;

  if ((word >> 48) != kSetupRequestType) return RrcReject::bad_type;
  const auto cause = static_cast<std::uint8_t>((word >> 5) & 0xF);
  if (cause > 7) return RrcReject::bad_cause;
  if ((word & 0x1F) != 0) return RrcReject::bad_spare;
  return RrcSetupRequest{(word >> 9) & kMaxIdentity, cause};
}

}  // namespace ranharness::ransim
