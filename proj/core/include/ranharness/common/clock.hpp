#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace ranharness {

/// Nanosecond time source used by the controller for heartbeats, timeouts and
/// log timestamps.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ns() const = 0;
};

/// Wall-clock anchored at construction, advanced by the steady clock so it
/// never goes backwards.
class SystemClock final : public Clock {
 public:
  SystemClock()
      : wall_origin_(std::chrono::duration_cast<std::chrono::nanoseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count()),
        steady_origin_(std::chrono::steady_clock::now()) {}

  std::int64_t now_ns() const override {
    const auto elapsed = std::chrono::steady_clock::now() - steady_origin_;
    return wall_origin_ +
           std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
  }

 private:
  std::int64_t wall_origin_;
  std::chrono::steady_clock::time_point steady_origin_;
};

/// Test clock that only moves when advanced.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ns = 1'000'000'000) : now_(start_ns) {}

  std::int64_t now_ns() const override { return now_.load(std::memory_order_acquire); }

  void advance(std::chrono::nanoseconds d) {
    now_.fetch_add(d.count(), std::memory_order_acq_rel);
  }

 private:
  std::atomic<std::int64_t> now_;
};

}  // namespace ranharness
