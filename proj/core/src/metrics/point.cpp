#include "ranharness/metrics/point.hpp"

#include <cmath>

namespace ranharness::metrics {

std::string check_point(const MetricPoint& p) {
  if (p.measurement.empty()) return "measurement must be nonempty";
  if (p.fields.empty()) return "point needs at least one field";
  if (!p.tags.count("component")) return "component tag missing";
  for (const auto& [k, v] : p.fields) {
    if (k.empty()) return "field names must be nonempty";
    if (!std::isfinite(v)) return "field " + k + " is not finite";
  }
  return {};
}

std::string format_tags(const Tags& tags) {
  std::string out;
  for (const auto& [k, v] : tags) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

Tags parse_tags(const std::string& text) {
  Tags tags;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq != std::string::npos) tags[item.substr(0, eq)] = item.substr(eq + 1);
    pos = end + 1;
  }
  return tags;
}

}  // namespace ranharness::metrics
