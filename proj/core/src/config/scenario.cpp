#include "ranharness/config/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ranharness/common/format.hpp"

namespace ranharness::config {

// ---------------------------------------------------------------------------
// ComponentSpec / ScenarioSpec accessors

namespace {

const ParamValue& require_param(const ComponentSpec& c, std::string_view key) {
  auto it = c.params.find(std::string(key));
  if (it == c.params.end())
    throw std::out_of_range(c.name + ": missing param " + std::string(key));
  return it->second;
}

}  // namespace

bool ComponentSpec::has_param(std::string_view key) const {
  return params.count(std::string(key)) != 0;
}

std::int64_t ComponentSpec::int_param(std::string_view key) const {
  const auto& v = require_param(*this, key);
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw std::invalid_argument(name + ": param " + std::string(key) + " is not an integer");
}

double ComponentSpec::number_param(std::string_view key) const {
  const auto& v = require_param(*this, key);
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::invalid_argument(name + ": param " + std::string(key) + " is not a number");
}

const std::string& ComponentSpec::string_param(std::string_view key) const {
  const auto& v = require_param(*this, key);
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw std::invalid_argument(name + ": param " + std::string(key) + " is not a string");
}

bool ComponentSpec::bool_param(std::string_view key) const {
  const auto& v = require_param(*this, key);
  if (auto* b = std::get_if<bool>(&v)) return *b;
  throw std::invalid_argument(name + ": param " + std::string(key) + " is not a boolean");
}

std::optional<std::int64_t> ComponentSpec::optional_int(std::string_view key) const {
  if (!has_param(key)) return std::nullopt;
  return int_param(key);
}

const ComponentSpec* ScenarioSpec::find(std::string_view name) const {
  for (const auto& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<std::size_t> ScenarioSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].name == name) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string node_class(const YAML::Node& n) {
  if (!n || n.IsNull()) return "null";
  if (n.IsSequence()) return "sequence";
  if (n.IsMap()) return "mapping";
  return "scalar";
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::integer: return "integer";
    case ParamType::number: return "number";
    case ParamType::string: return "string";
    case ParamType::boolean: return "boolean";
    case ParamType::gnb_ref: return "component name";
  }
  return "value";
}

std::string component_path(std::size_t i) { return "components[" + std::to_string(i) + "]"; }

class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& out) : out_(out) {}

  void error(const YAML::Node& n, const std::string& path, std::string message) {
    Diagnostic d{path, std::move(message), 0, 0};
    if (n && !n.Mark().is_null()) {
      d.line = n.Mark().line + 1;
      d.column = n.Mark().column + 1;
    } else if (auto it = marks_.find(parent_of(path)); it != marks_.end()) {
      d.line = it->second.first;
      d.column = it->second.second;
    }
    out_.push_back(std::move(d));
  }

  void remember(const YAML::Node& n, const std::string& path) {
    if (n && !n.Mark().is_null()) marks_[path] = {n.Mark().line + 1, n.Mark().column + 1};
  }

  std::pair<int, int> mark_for(std::string path) const {
    while (true) {
      if (auto it = marks_.find(path); it != marks_.end()) return it->second;
      if (path.empty()) return {0, 0};
      path = parent_of(path);
    }
  }

  void mismatch(const YAML::Node& n, const std::string& path, const char* expected) {
    error(n, path, std::string("type mismatch: expected ") + expected + ", got " + node_class(n));
  }

  /// Checks that node is a mapping and that every key is in allowed.
  bool mapping(const YAML::Node& n, const std::string& path,
               std::initializer_list<std::string_view> allowed) {
    remember(n, path);
    if (!n.IsMap()) {
      mismatch(n, path, "mapping");
      return false;
    }
    for (auto it = n.begin(); it != n.end(); ++it) {
      if (!it->first.IsScalar()) {
        error(it->first, path, "mapping keys must be scalars");
        continue;
      }
      const std::string key = it->first.Scalar();
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) error(it->first, join(path, key), "unknown key");
    }
    return true;
  }

  std::optional<std::string> string(const YAML::Node& n, const std::string& path) {
    remember(n, path);
    if (!n.IsScalar()) {
      mismatch(n, path, "string");
      return std::nullopt;
    }
    return n.Scalar();
  }

  std::optional<std::uint64_t> unsigned_integer(const YAML::Node& n, const std::string& path,
                                                std::uint64_t max) {
    remember(n, path);
    auto text = plain_scalar(n);
    if (!text) {
      mismatch(n, path, "unsigned integer");
      return std::nullopt;
    }
    if (!text->empty() && (*text)[0] == '-') {
      error(n, path, "must be a non-negative integer");
      return std::nullopt;
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec == std::errc::result_out_of_range || (ec == std::errc() && v > max)) {
      error(n, path, "integer out of range (max " + std::to_string(max) + ")");
      return std::nullopt;
    }
    if (ec != std::errc() || p != text->data() + text->size()) {
      mismatch(n, path, "unsigned integer");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::int64_t> integer(const YAML::Node& n, const std::string& path) {
    remember(n, path);
    auto text = plain_scalar(n);
    if (!text) {
      mismatch(n, path, "integer");
      return std::nullopt;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec == std::errc::result_out_of_range) {
      error(n, path, "integer out of range");
      return std::nullopt;
    }
    if (ec != std::errc() || p != text->data() + text->size()) {
      mismatch(n, path, "integer");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> number(const YAML::Node& n, const std::string& path) {
    remember(n, path);
    auto text = plain_scalar(n);
    if (!text) {
      mismatch(n, path, "number");
      return std::nullopt;
    }
    double v = 0;
    auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || p != text->data() + text->size()) {
      mismatch(n, path, "number");
      return std::nullopt;
    }
    if (!std::isfinite(v)) {
      error(n, path, "number must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const YAML::Node& n, const std::string& path) {
    remember(n, path);
    auto text = plain_scalar(n);
    if (text) {
      if (*text == "true" || *text == "True" || *text == "TRUE") return true;
      if (*text == "false" || *text == "False" || *text == "FALSE") return false;
    }
    mismatch(n, path, "boolean");
    return std::nullopt;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  static std::string parent_of(const std::string& path) {
    auto cut = path.find_last_of(".[");
    return cut == std::string::npos ? std::string() : path.substr(0, cut);
  }

 private:
  // Plain (unquoted) scalar text, or nullopt for quoted scalars and collections.
  static std::optional<std::string> plain_scalar(const YAML::Node& n) {
    if (!n.IsScalar() || n.Tag() != "?") return std::nullopt;
    return n.Scalar();
  }

  std::vector<Diagnostic>& out_;
  std::unordered_map<std::string, std::pair<int, int>> marks_;
};

std::optional<ParamValue> read_param(Reader& r, const YAML::Node& n, const std::string& path,
                                     ParamType type) {
  switch (type) {
    case ParamType::integer:
      if (auto v = r.integer(n, path)) return ParamValue{*v};
      return std::nullopt;
    case ParamType::number:
      if (auto v = r.number(n, path)) return ParamValue{*v};
      return std::nullopt;
    case ParamType::boolean:
      if (auto v = r.boolean(n, path)) return ParamValue{*v};
      return std::nullopt;
    case ParamType::string:
    case ParamType::gnb_ref:
      if (auto v = r.string(n, path)) return ParamValue{*v};
      return std::nullopt;
  }
  return std::nullopt;
}

// Untyped read for params of unknown kinds; keeps the value for round-trips.
std::optional<ParamValue> read_untyped(Reader& r, const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) {
    r.mismatch(n, path, "scalar");
    return std::nullopt;
  }
  const std::string& s = n.Scalar();
  if (n.Tag() == "?") {
    std::int64_t i = 0;
    auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ei == std::errc() && pi == s.data() + s.size()) return ParamValue{i};
    double d = 0;
    auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ed == std::errc() && pd == s.data() + s.size() && std::isfinite(d)) return ParamValue{d};
    if (s == "true" || s == "false") return ParamValue{s == "true"};
  }
  return ParamValue{s};
}

void parse_component(Reader& r, const YAML::Node& n, std::size_t index, const KindCatalog& catalog,
                     ComponentSpec& out) {
  const std::string path = component_path(index);
  if (!r.mapping(n, path, {"name", "kind", "depends_on", "params", "position_m"})) return;

  if (const auto name = n["name"]) {
    if (auto s = r.string(name, path + ".name")) out.name = *s;
  } else {
    r.error(n, path + ".name", "missing required key");
  }

  const KindSchema* schema = nullptr;
  if (const auto kind = n["kind"]) {
    if (auto s = r.string(kind, path + ".kind")) {
      out.kind = *s;
      schema = catalog.find(*s);
      if (!schema) r.error(kind, path + ".kind", "unknown kind '" + *s + "'");
    }
  } else {
    r.error(n, path + ".kind", "missing required key");
  }

  if (const auto deps = n["depends_on"]) {
    r.remember(deps, path + ".depends_on");
    if (deps.IsSequence()) {
      for (std::size_t i = 0; i < deps.size(); ++i) {
        const std::string dpath = path + ".depends_on[" + std::to_string(i) + "]";
        if (auto s = r.string(deps[i], dpath)) out.depends_on.push_back(*s);
      }
    } else if (!deps.IsNull()) {
      r.mismatch(deps, path + ".depends_on", "sequence");
    }
  }

  if (const auto pos = n["position_m"]) {
    if (auto v = r.number(pos, path + ".position_m")) out.position_m = *v;
  }

  if (const auto params = n["params"]) {
    const std::string ppath = path + ".params";
    r.remember(params, ppath);
    if (params.IsMap()) {
      for (auto it = params.begin(); it != params.end(); ++it) {
        if (!it->first.IsScalar()) {
          r.error(it->first, ppath, "mapping keys must be scalars");
          continue;
        }
        const std::string key = it->first.Scalar();
        const std::string kpath = ppath + "." + key;
        std::optional<ParamValue> value;
        if (schema) {
          const ParamRule* rule = schema->rule(key);
          if (!rule) {
            r.error(it->first, kpath, "unknown key");
            continue;
          }
          value = read_param(r, it->second, kpath, rule->type);
        } else {
          value = read_untyped(r, it->second, kpath);
        }
        if (value) out.params.insert_or_assign(key, std::move(*value));
      }
    } else if (!params.IsNull()) {
      r.mismatch(params, ppath, "mapping");
    }
  }
}

}  // namespace

ParseResult parse_scenario(std::string_view text, const KindCatalog& catalog) {
  ParseResult result;
  auto& diags = result.diagnostics;

  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    diags.push_back({"", "syntax error: " + e.msg, e.mark.line + 1, e.mark.column + 1});
    return result;
  }

  Reader r(diags);
  ScenarioSpec spec;

  if (!root.IsMap()) {
    r.mismatch(root, "", "mapping at document root");
    return result;
  }
  r.mapping(root, "", {"scenario", "channel", "components"});

  if (const auto s = root["scenario"]) {
    if (r.mapping(s, "scenario", {"id", "seed", "duration_slots", "slot_us", "realtime"})) {
      if (const auto n = s["id"]) {
        if (auto v = r.string(n, "scenario.id")) spec.id = *v;
      } else {
        r.error(s, "scenario.id", "missing required key");
      }
      if (const auto n = s["seed"]) {
        if (auto v = r.unsigned_integer(n, "scenario.seed", UINT64_MAX)) spec.seed = *v;
      } else {
        r.error(s, "scenario.seed", "missing required key");
      }
      if (const auto n = s["duration_slots"]) {
        if (auto v = r.unsigned_integer(n, "scenario.duration_slots", UINT32_MAX))
          spec.duration_slots = static_cast<std::uint32_t>(*v);
      } else {
        r.error(s, "scenario.duration_slots", "missing required key");
      }
      if (const auto n = s["slot_us"]) {
        if (auto v = r.unsigned_integer(n, "scenario.slot_us", UINT32_MAX))
          spec.slot_us = static_cast<std::uint32_t>(*v);
      }
      if (const auto n = s["realtime"]) {
        if (auto v = r.boolean(n, "scenario.realtime")) spec.realtime = *v;
      }
    }
  } else {
    r.error(root, "scenario", "missing required key");
  }

  if (const auto c = root["channel"]) {
    if (r.mapping(c, "channel", {"pl0_db", "d0_m", "exponent", "noise_dbm"})) {
      auto read = [&](const char* key, double& field) {
        if (const auto n = c[key])
          if (auto v = r.number(n, std::string("channel.") + key)) field = *v;
      };
      read("pl0_db", spec.channel.pl0_db);
      read("d0_m", spec.channel.d0_m);
      read("exponent", spec.channel.exponent);
      read("noise_dbm", spec.channel.noise_dbm);
    }
  }

  if (const auto comps = root["components"]) {
    r.remember(comps, "components");
    if (comps.IsSequence()) {
      for (std::size_t i = 0; i < comps.size(); ++i) {
        ComponentSpec c;
        parse_component(r, comps[i], i, catalog, c);
        spec.components.push_back(std::move(c));
      }
    } else {
      r.mismatch(comps, "components", "sequence");
    }
  } else {
    r.error(root, "components", "missing required key");
  }

  // Semantic checks; a path that already failed to parse is not reported twice.
  std::set<std::string> reported;
  for (const auto& d : diags) reported.insert(d.path);
  for (auto& d : validate(spec, catalog)) {
    if (reported.count(d.path)) continue;
    std::tie(d.line, d.column) = r.mark_for(d.path);
    diags.push_back(std::move(d));
  }

  if (diags.empty()) {
    apply_defaults(spec, catalog);
    result.value = std::move(spec);
  }
  return result;
}

ParseResult load_scenario_file(const std::string& path, const KindCatalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({path, "cannot read file", 0, 0});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), catalog);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool type_matches(const ParamValue& v, ParamType t) {
  switch (t) {
    case ParamType::integer: return std::holds_alternative<std::int64_t>(v);
    case ParamType::number:
      return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
    case ParamType::boolean: return std::holds_alternative<bool>(v);
    case ParamType::string:
    case ParamType::gnb_ref: return std::holds_alternative<std::string>(v);
  }
  return false;
}

std::optional<double> numeric(const ParamValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

}  // namespace

std::vector<Diagnostic> validate(const ScenarioSpec& spec, const KindCatalog& catalog) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string path, std::string msg) {
    out.push_back({std::move(path), std::move(msg), 0, 0});
  };

  if (spec.id.empty()) add("scenario.id", "must be a nonempty string");
  if (spec.duration_slots < 1) add("scenario.duration_slots", "must be >= 1");
  if (spec.slot_us < 1) add("scenario.slot_us", "must be >= 1");
  if (!(spec.channel.exponent > 0)) add("channel.exponent", "must be > 0");
  if (!(spec.channel.d0_m > 0)) add("channel.d0_m", "must be > 0");
  if (spec.components.empty()) add("components", "at least one component is required");

  std::map<std::string, std::size_t> first_index;
  std::vector<std::size_t> gnbs;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    if (c.name.empty()) {
      add(component_path(i) + ".name", "must be a nonempty string");
      continue;
    }
    auto [it, inserted] = first_index.emplace(c.name, i);
    if (!inserted)
      add(component_path(i) + ".name",
          "duplicate component name '" + c.name + "' (first at " + component_path(it->second) + ")");
    if (c.kind == kinds::gnb) gnbs.push_back(i);
  }
  if (gnbs.size() > 1)
    add(component_path(gnbs[1]) + ".kind", "at most one gnb component is supported");

  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    const std::string path = component_path(i);

    for (std::size_t d = 0; d < c.depends_on.size(); ++d) {
      const std::string dpath = path + ".depends_on[" + std::to_string(d) + "]";
      if (c.depends_on[d] == c.name)
        add(dpath, "component cannot depend on itself");
      else if (!first_index.count(c.depends_on[d]))
        add(dpath, "unknown component '" + c.depends_on[d] + "'");
    }
    if (c.position_m && !(*c.position_m >= 0)) add(path + ".position_m", "must be >= 0");

    const KindSchema* schema = catalog.find(c.kind);
    if (!schema) {
      if (c.kind.empty())
        add(path + ".kind", "must be a nonempty string");
      else
        add(path + ".kind", "unknown kind '" + c.kind + "'");
      continue;
    }
    if (schema->needs_gnb && gnbs.empty())
      add(path + ".kind", c.kind + " requires a gnb component in the scenario");
    if (schema->needs_position && !c.position_m) add(path + ".position_m", "missing required key");

    for (const auto& [key, value] : c.params) {
      const std::string kpath = path + ".params." + key;
      const ParamRule* rule = schema->rule(key);
      if (!rule) {
        add(kpath, "unknown key");
        continue;
      }
      if (!type_matches(value, rule->type)) {
        add(kpath, std::string("type mismatch: expected ") + type_name(rule->type));
        continue;
      }
      if (auto num = numeric(value)) {
        if (rule->min && *num < *rule->min)
          add(kpath, "must be >= " + format_double(*rule->min));
        if (rule->max && *num > *rule->max)
          add(kpath, "must be <= " + format_double(*rule->max));
      }
      if (rule->type == ParamType::gnb_ref) {
        const auto& target = std::get<std::string>(value);
        const ComponentSpec* t = spec.find(target);
        if (!t)
          add(kpath, "unknown component '" + target + "'");
        else if (t->kind != kinds::gnb)
          add(kpath, "'" + target + "' is not a gnb");
      }
    }
    for (const auto& rule : schema->params)
      if (rule.required && !c.params.count(rule.key))
        add(path + ".params." + rule.key, "missing required key");

    auto start = c.params.find("start_slot");
    auto stop = c.params.find("stop_slot");
    if (start != c.params.end() && stop != c.params.end()) {
      auto a = numeric(start->second), b = numeric(stop->second);
      if (a && b && *a > *b) add(path + ".params.stop_slot", "must be >= start_slot");
    }
  }
  return out;
}

void apply_defaults(ScenarioSpec& spec, const KindCatalog& catalog) {
  for (auto& c : spec.components) {
    const KindSchema* schema = catalog.find(c.kind);
    if (!schema) continue;
    for (const auto& rule : schema->params) {
      auto it = c.params.find(rule.key);
      if (it == c.params.end()) {
        if (rule.fallback) c.params.emplace(rule.key, *rule.fallback);
      } else if (rule.type == ParamType::number) {
        if (auto* i = std::get_if<std::int64_t>(&it->second))
          it->second = static_cast<double>(*i);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void emit_value(YAML::Emitter& e, const ParamValue& v) {
  if (auto* s = std::get_if<std::string>(&v))
    e << YAML::DoubleQuoted << *s;
  else
    e << to_string(v);
}

}  // namespace

std::string to_yaml(const ScenarioSpec& spec) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << spec.id;
  e << YAML::Key << "seed" << YAML::Value << std::to_string(spec.seed);
  e << YAML::Key << "duration_slots" << YAML::Value << std::to_string(spec.duration_slots);
  e << YAML::Key << "slot_us" << YAML::Value << std::to_string(spec.slot_us);
  e << YAML::Key << "realtime" << YAML::Value << (spec.realtime ? "true" : "false");
  e << YAML::EndMap;

  e << YAML::Key << "channel" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "pl0_db" << YAML::Value << format_double(spec.channel.pl0_db);
  e << YAML::Key << "d0_m" << YAML::Value << format_double(spec.channel.d0_m);
  e << YAML::Key << "exponent" << YAML::Value << format_double(spec.channel.exponent);
  e << YAML::Key << "noise_dbm" << YAML::Value << format_double(spec.channel.noise_dbm);
  e << YAML::EndMap;

  e << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : spec.components) {
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << c.name;
    e << YAML::Key << "kind" << YAML::Value << YAML::DoubleQuoted << c.kind;
    e << YAML::Key << "depends_on" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& d : c.depends_on) e << YAML::DoubleQuoted << d;
    e << YAML::EndSeq;
    if (c.position_m)
      e << YAML::Key << "position_m" << YAML::Value << format_double(*c.position_m);
    if (!c.params.empty()) {
      e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
      for (const auto& [k, v] : c.params) {
        e << YAML::Key << k << YAML::Value;
        emit_value(e, v);
      }
      e << YAML::EndMap;
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace ranharness::config
