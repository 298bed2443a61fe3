#include "ranharness/controller/log_bus.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace ranharness::controller {

std::string to_string(LogLevel l) {
  switch (l) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    case LogLevel::error: return "error";
  }
  return "info";
}

std::string to_json_line(const LogRecord& r) {
  nlohmann::ordered_json j;
  j["ts"] = r.ts_ns;
  j["slot"] = r.slot ? nlohmann::ordered_json(*r.slot) : nlohmann::ordered_json(nullptr);
  j["component"] = r.component;
  j["level"] = to_string(r.level);
  j["msg"] = r.message;
  return j.dump();
}

LogBus::LogBus(const Clock& clock, std::size_t capacity)
    : clock_(clock),
      capacity_(capacity == 0 ? 1 : capacity),
      collector_([this](std::stop_token st) { collect(st); }) {}

LogBus::~LogBus() {
  collector_.request_stop();
  collector_.join();
}

void LogBus::log(const std::string& component, LogLevel level, std::string message,
                 std::optional<std::uint64_t> slot) {
  std::unique_lock lock(mu_);
  not_full_.wait(lock, [&] { return queue_.size() < capacity_; });
  auto& last = last_ts_[component];
  const std::int64_t ts = std::max(clock_.now_ns(), last);
  last = ts;
  queue_.push_back({ts, slot, component, level, std::move(message), seq_++});
  not_empty_.notify_one();
}

void LogBus::collect(std::stop_token stop) {
  std::unique_lock lock(mu_);
  while (true) {
    not_empty_.wait(lock, stop, [&] { return !queue_.empty(); });
    if (queue_.empty()) return;
    while (!queue_.empty()) {
      archive_.push_back(std::move(queue_.front()));
      queue_.pop_front();
      ++collected_;
    }
    not_full_.notify_all();
    idle_.notify_all();
  }
}

std::vector<LogRecord> LogBus::drain() {
  std::unique_lock lock(mu_);
  idle_.wait(lock, [&] { return queue_.empty(); });
  std::vector<LogRecord> out;
  out.swap(archive_);
  lock.unlock();
  std::sort(out.begin(), out.end(), [](const LogRecord& a, const LogRecord& b) {
    if (a.ts_ns != b.ts_ns) return a.ts_ns < b.ts_ns;
    if (a.component != b.component) return a.component < b.component;
    return a.seq < b.seq;
  });
  return out;
}

std::uint64_t LogBus::total() const {
  std::lock_guard lock(mu_);
  return seq_;
}

}  // namespace ranharness::controller
