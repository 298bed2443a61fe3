#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ranharness::metrics {

using Tags = std::map<std::string, std::string>;
using Fields = std::map<std::string, double>;

/// One timestamped measurement. ts_slot is a simulation slot, never wall time.
struct MetricPoint {
  std::string measurement;
  Tags tags;
  Fields fields;
  std::uint64_t ts_slot = 0;
};

struct Sample {
  std::uint64_t slot = 0;
  double value = 0;

  bool operator==(const Sample&) const = default;
};

/// All samples of one (measurement, tag set), per field, ordered by slot.
struct Series {
  std::string measurement;
  Tags tags;
  std::map<std::string, std::vector<Sample>> fields;

  bool operator==(const Series&) const = default;
};

/// Destination for points produced by one component.
class PointWriter {
 public:
  virtual ~PointWriter() = default;
  virtual void write(MetricPoint p) = 0;
};

/// Returns an empty string for a valid point, otherwise the reason.
std::string check_point(const MetricPoint& p);

/// "k=v;k2=v2" with keys sorted.
std::string format_tags(const Tags& tags);
Tags parse_tags(const std::string& text);

}  // namespace ranharness::metrics
