#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ranharness/metrics/point.hpp"

namespace ranharness::metrics {

/// Parses `measurement,tag=val,... field=1.0,field2=2 <slot>`.
std::optional<MetricPoint> parse_line(std::string_view line, std::string* error = nullptr);
std::string format_line(const MetricPoint& p);

}  // namespace ranharness::metrics
