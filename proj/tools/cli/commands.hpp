#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ranharness/controller/runtime.hpp"
#include "ranharness/metrics/export.hpp"

namespace ranharness::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalid = 1,
  kComponentFailure = 2,
  kInternal = 3,
};

struct RunOptions {
  std::optional<std::filesystem::path> outdir;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint32_t> duration_override;
  std::vector<controller::KillAt> kills;
  bool trace = false;
  /// Polled while the run is in progress; when set the run is stopped
  /// gracefully.
  const std::atomic<bool>* interrupt = nullptr;
  controller::ControllerOptions controller;
};

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_plan(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& path, const RunOptions& options, std::ostream& out,
            std::ostream& err);
int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);
int cmd_export(const std::filesystem::path& dir, metrics::ExportFormat format, std::ostream& out,
               std::ostream& err);

/// Parses NAME@SLOT.
std::optional<controller::KillAt> parse_kill(const std::string& text);

}  // namespace ranharness::cli
