#pragma once

#include <string>

#include "ranharness/controller/controller.hpp"

namespace ranharness::controller {

/// Pretty-printed JSON document for report.json.
std::string to_json(const RunReport& report);

/// Throws std::runtime_error on malformed input.
RunReport parse_report(const std::string& text);

}  // namespace ranharness::controller
