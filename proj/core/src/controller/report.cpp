#include "ranharness/controller/report.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ranharness/common/format.hpp"

namespace ranharness::controller {

std::string to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["scenario_id"] = r.scenario_id;
  j["seed"] = r.seed;
  j["started_at_ns"] = r.started_at_ns;
  j["finished_at_ns"] = r.finished_at_ns;
  auto comps = nlohmann::ordered_json::array();
  for (const auto& c : r.components) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["kind"] = c.kind;
    e["state"] = to_string(c.status.state);
    e["reason"] = c.status.reason ? nlohmann::ordered_json(*c.status.reason)
                                  : nlohmann::ordered_json(nullptr);
    e["restarts"] = c.status.restarts;
    e["heartbeats"] = c.status.heartbeats;
    comps.push_back(std::move(e));
  }
  j["components"] = std::move(comps);
  j["counters"] = {{"heartbeats", r.heartbeats},
                   {"restarts", r.restarts},
                   {"log_records", r.log_records}};
  j["exports"] = r.exports;
  j["event_digest"] = r.event_digest ? nlohmann::ordered_json(hex64(*r.event_digest))
                                     : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunReport r;
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.started_at_ns = j.at("started_at_ns").get<std::int64_t>();
    r.finished_at_ns = j.at("finished_at_ns").get<std::int64_t>();
    for (const auto& e : j.at("components")) {
      ComponentReport c;
      c.name = e.at("name").get<std::string>();
      c.kind = e.at("kind").get<std::string>();
      auto state = parse_state(e.at("state").get<std::string>());
      if (!state) throw std::runtime_error("unknown state in report");
      c.status.state = *state;
      if (!e.at("reason").is_null()) c.status.reason = e.at("reason").get<std::string>();
      c.status.restarts = e.at("restarts").get<std::uint32_t>();
      c.status.heartbeats = e.at("heartbeats").get<std::uint64_t>();
      r.components.push_back(std::move(c));
    }
    const auto& counters = j.at("counters");
    r.heartbeats = counters.at("heartbeats").get<std::uint64_t>();
    r.restarts = counters.at("restarts").get<std::uint64_t>();
    r.log_records = counters.at("log_records").get<std::uint64_t>();
    r.exports = j.at("exports").get<std::vector<std::string>>();
    if (!j.at("event_digest").is_null())
      r.event_digest = std::stoull(j.at("event_digest").get<std::string>(), nullptr, 16);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
}

}  // namespace ranharness::controller
