#include "ranharness/config/schema.hpp"

#include "ranharness/common/format.hpp"

namespace ranharness::config {

const ParamRule* KindSchema::rule(std::string_view key) const {
  for (const auto& r : params)
    if (r.key == key) return &r;
  return nullptr;
}

namespace {

ParamRule integer(std::string key, std::optional<std::int64_t> fallback, double min,
                  std::optional<double> max = std::nullopt) {
  ParamRule r{std::move(key), ParamType::integer, false, std::nullopt, min, max};
  if (fallback) r.fallback = ParamValue{*fallback};
  return r;
}

ParamRule required_integer(std::string key, double min, std::optional<double> max = std::nullopt) {
  return {std::move(key), ParamType::integer, true, std::nullopt, min, max};
}

ParamRule number(std::string key, std::optional<double> fallback,
                 std::optional<double> min = std::nullopt) {
  ParamRule r{std::move(key), ParamType::number, false, std::nullopt, min, std::nullopt};
  if (fallback) r.fallback = ParamValue{*fallback};
  return r;
}

ParamRule required_number(std::string key, std::optional<double> min = std::nullopt) {
  return {std::move(key), ParamType::number, true, std::nullopt, min, std::nullopt};
}

ParamRule gnb_target() { return {"target", ParamType::gnb_ref, true, std::nullopt, {}, {}}; }

KindCatalog make_builtin() {
  KindCatalog c;
  c.add(std::string(kinds::gnb),
        KindSchema{{integer("max_connections", 32, 1),
                    integer("rach_period_slots", 10, 1),
                    integer("pdcch_candidates", 16, 1, 64),
                    {"crash_on_overflow", ParamType::boolean, false, ParamValue{false}, {}, {}},
                    integer("pending_capacity", 128, 1),
                    integer("contention_timer_slots", 8, 1),
                    integer("n_rb", 52, 1, 275)},
                   false, false});
  c.add(std::string(kinds::ue),
        KindSchema{{integer("attach_slot", 0, 0),
                    number("tx_power_dbm", 20.0),
                    number("rlf_threshold_db", -5.0),
                    integer("rlf_slots", 10, 1)},
                   true, true});
  c.add(std::string(kinds::jammer),
        KindSchema{{required_number("gain_db"),
                    required_number("distance_m", 0.0),
                    integer("start_slot", 0, 0),
                    integer("stop_slot", std::nullopt, 0)},
                   false, false});
  c.add(std::string(kinds::rrc_fuzzer),
        KindSchema{{required_integer("bits_to_flip", 0, 56),
                    integer("attempts", 100, 0),
                    gnb_target()},
                   true, false});
  c.add(std::string(kinds::rach_flooder),
        KindSchema{{required_integer("preambles_per_occasion", 1, 4096),
                    integer("start_slot", 0, 0),
                    integer("stop_slot", std::nullopt, 0)},
                   true, false});
  c.add(std::string(kinds::dci_sniffer), KindSchema{{gnb_target()}, true, false});
  c.add(std::string(kinds::iq_collector),
        KindSchema{{required_integer("burst_len", 1), required_integer("period", 1)}, false,
                   false});
  return c;
}

}  // namespace

const KindCatalog& KindCatalog::builtin() {
  static const KindCatalog catalog = make_builtin();
  return catalog;
}

KindCatalog& KindCatalog::add(std::string kind, KindSchema schema) {
  kinds_.insert_or_assign(std::move(kind), std::move(schema));
  return *this;
}

const KindSchema* KindCatalog::find(std::string_view kind) const {
  auto it = kinds_.find(kind);
  return it == kinds_.end() ? nullptr : &it->second;
}

std::vector<std::string> KindCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : kinds_) out.push_back(k);
  return out;
}

std::string to_string(const ParamValue& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace ranharness::config
