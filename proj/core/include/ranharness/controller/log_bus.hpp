#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ranharness/common/clock.hpp"

namespace ranharness::controller {

enum class LogLevel { debug, info, warn, error };

std::string to_string(LogLevel l);

struct LogRecord {
  std::int64_t ts_ns = 0;
  std::optional<std::uint64_t> slot;
  std::string component;
  LogLevel level = LogLevel::info;
  std::string message;
  std::uint64_t seq = 0;
};

/// `{"ts":..,"slot":..|null,"component":..,"level":..,"msg":..}` without a
/// trailing newline.
std::string to_json_line(const LogRecord& r);

/// Bounded multi-producer log queue drained by one collector thread.
/// Producers block while the queue is full.
class LogBus {
 public:
  LogBus(const Clock& clock, std::size_t capacity = 65536);
  ~LogBus();
  LogBus(const LogBus&) = delete;
  LogBus& operator=(const LogBus&) = delete;

  void log(const std::string& component, LogLevel level, std::string message,
           std::optional<std::uint64_t> slot = std::nullopt);

  /// Every record logged since the previous drain, ordered by
  /// (ts, component, seq). Timestamps never decrease within a component.
  std::vector<LogRecord> drain();

  std::uint64_t total() const;
  std::size_t capacity() const { return capacity_; }

 private:
  void collect(std::stop_token stop);

  const Clock& clock_;
  std::size_t capacity_;

  mutable std::mutex mu_;
  std::condition_variable_any not_full_;
  std::condition_variable_any not_empty_;
  std::condition_variable_any idle_;
  std::deque<LogRecord> queue_;
  std::map<std::string, std::int64_t> last_ts_;
  std::uint64_t seq_ = 0;
  std::uint64_t collected_ = 0;
  std::vector<LogRecord> archive_;
  std::jthread collector_;
};

}  // namespace ranharness::controller
