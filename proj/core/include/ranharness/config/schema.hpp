#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ranharness::config {

/// Scalar parameter value. Numbers are stored normalized to the type their
/// schema declares.
using ParamValue = std::variant<std::int64_t, double, std::string, bool>;

enum class ParamType { integer, number, string, boolean, gnb_ref };

struct ParamRule {
  std::string key;
  ParamType type = ParamType::integer;
  bool required = false;
  std::optional<ParamValue> fallback;
  std::optional<double> min;
  std::optional<double> max;
};

struct KindSchema {
  std::vector<ParamRule> params;
  /// Component needs a gnb somewhere in the scenario.
  bool needs_gnb = false;
  /// Component must carry position_m.
  bool needs_position = false;

  const ParamRule* rule(std::string_view key) const;
};

namespace kinds {
inline constexpr std::string_view gnb = "gnb";
inline constexpr std::string_view ue = "ue";
inline constexpr std::string_view jammer = "jammer";
inline constexpr std::string_view rrc_fuzzer = "rrc_fuzzer";
inline constexpr std::string_view rach_flooder = "rach_flooder";
inline constexpr std::string_view dci_sniffer = "dci_sniffer";
inline constexpr std::string_view iq_collector = "iq_collector";
}  // namespace kinds

/// The set of component kinds a document may use, with their parameter
/// schemas. Extension kinds are added to a copy, so parsing stays pure.
class KindCatalog {
 public:
  static const KindCatalog& builtin();

  KindCatalog& add(std::string kind, KindSchema schema);
  const KindSchema* find(std::string_view kind) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, KindSchema, std::less<>> kinds_;
};

std::string to_string(const ParamValue& v);

}  // namespace ranharness::config
