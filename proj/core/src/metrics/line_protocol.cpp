#include "ranharness/metrics/line_protocol.hpp"

#include <charconv>

#include "ranharness/common/format.hpp"

namespace ranharness::metrics {

namespace {

bool fail(std::string* error, const char* why) {
  if (error) *error = why;
  return false;
}

// Splits "k=v,k2=v2" into pairs. Returns false on a malformed pair.
bool split_pairs(std::string_view text, std::map<std::string, std::string>& out) {
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) return false;
    out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return true;
}

}  // namespace

std::optional<MetricPoint> parse_line(std::string_view line, std::string* error) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  const auto sp1 = line.find(' ');
  const auto sp2 = sp1 == std::string_view::npos ? sp1 : line.find(' ', sp1 + 1);
  if (sp2 == std::string_view::npos || line.find(' ', sp2 + 1) != std::string_view::npos) {
    fail(error, "expected 'measurement[,tags] fields slot'");
    return std::nullopt;
  }
  MetricPoint p;
  const auto head = line.substr(0, sp1);
  const auto comma = head.find(',');
  p.measurement = std::string(head.substr(0, comma));
  if (comma != std::string_view::npos && !split_pairs(head.substr(comma + 1), p.tags)) {
    fail(error, "malformed tag");
    return std::nullopt;
  }
  std::map<std::string, std::string> raw_fields;
  if (!split_pairs(line.substr(sp1 + 1, sp2 - sp1 - 1), raw_fields)) {
    fail(error, "malformed field");
    return std::nullopt;
  }
  for (const auto& [k, v] : raw_fields) {
    double d = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      fail(error, "field value is not a number");
      return std::nullopt;
    }
    p.fields[k] = d;
  }
  const auto ts = line.substr(sp2 + 1);
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), p.ts_slot);
  if (ec != std::errc() || ptr != ts.data() + ts.size()) {
    fail(error, "bad slot");
    return std::nullopt;
  }
  if (p.measurement.empty() || p.fields.empty()) {
    fail(error, "measurement and at least one field are required");
    return std::nullopt;
  }
  return p;
}

std::string format_line(const MetricPoint& p) {
  std::string out = p.measurement;
  for (const auto& [k, v] : p.tags) out += ',' + k + '=' + v;
  out += ' ';
  bool first = true;
  for (const auto& [k, v] : p.fields) {
    if (!first) out += ',';
    first = false;
    out += k + '=' + format_double(v);
  }
  out += ' ' + std::to_string(p.ts_slot);
  return out;
}

}  // namespace ranharness::metrics
