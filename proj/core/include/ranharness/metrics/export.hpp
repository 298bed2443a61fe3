#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ranharness/metrics/store.hpp"

namespace ranharness::metrics {

enum class ExportFormat { csv, json };

std::optional<ExportFormat> parse_export_format(const std::string& s);

/// Header `measurement,tags,ts_slot,field,value`, one row per sample, ordered
/// by measurement, tag set, field and slot.
void write_csv(const MetricsStore& store, std::ostream& out);
void write_json(const MetricsStore& store, std::ostream& out);

MetricsStore read_csv(std::istream& in);
MetricsStore read_json(std::istream& in);

/// Writes the file; throws std::system_error carrying the OS cause.
void export_store(const MetricsStore& store, ExportFormat format,
                  const std::filesystem::path& path);
MetricsStore import_store(const std::filesystem::path& path);

}  // namespace ranharness::metrics
