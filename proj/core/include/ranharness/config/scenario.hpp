#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ranharness/common/diagnostic.hpp"
#include "ranharness/config/schema.hpp"

namespace ranharness::config {

struct ChannelSpec {
  double pl0_db = 40.0;
  double d0_m = 1.0;
  double exponent = 2.7;
  double noise_dbm = -94.0;

  bool operator==(const ChannelSpec&) const = default;
};

struct ComponentSpec {
  std::string name;
  std::string kind;
  std::vector<std::string> depends_on;
  std::map<std::string, ParamValue> params;
  std::optional<double> position_m;

  bool operator==(const ComponentSpec&) const = default;

  bool has_param(std::string_view key) const;
  std::int64_t int_param(std::string_view key) const;
  double number_param(std::string_view key) const;
  const std::string& string_param(std::string_view key) const;
  bool bool_param(std::string_view key) const;
  std::optional<std::int64_t> optional_int(std::string_view key) const;
};

struct ScenarioSpec {
  std::string id;
  std::uint64_t seed = 0;
  std::uint32_t duration_slots = 0;
  std::uint32_t slot_us = 1000;
  bool realtime = false;
  ChannelSpec channel;
  std::vector<ComponentSpec> components;

  bool operator==(const ScenarioSpec&) const = default;

  const ComponentSpec* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
};

using ParseResult = Checked<ScenarioSpec>;

/// Parses and validates a scenario document. All problems are collected and
/// returned together; on success defaults are applied.
ParseResult parse_scenario(std::string_view text,
                           const KindCatalog& catalog = KindCatalog::builtin());

/// Reads a file and parses it. An unreadable file yields a single diagnostic
/// whose path is the file name.
ParseResult load_scenario_file(const std::string& path,
                               const KindCatalog& catalog = KindCatalog::builtin());

/// Semantic checks on an already-built spec (uniqueness, references, params).
std::vector<Diagnostic> validate(const ScenarioSpec& spec,
                                 const KindCatalog& catalog = KindCatalog::builtin());

/// Fills in every documented default. Idempotent.
void apply_defaults(ScenarioSpec& spec, const KindCatalog& catalog = KindCatalog::builtin());

/// Canonical document text; parse_scenario(to_yaml(s)) == s for valid s.
std::string to_yaml(const ScenarioSpec& spec);

}  // namespace ranharness::config
