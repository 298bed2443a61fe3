#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "ranharness/metrics/point.hpp"
#include "ranharness/metrics/store.hpp"

namespace ranharness::metrics {

class MetricsHub;

/// Per-component ingestion channel. Points are tagged with the component and
/// queued; a full queue blocks only this session's producer.
class Session final : public PointWriter {
 public:
  const std::string& component() const { return component_; }

  /// Throws std::logic_error("session closed") after close(), and
  /// std::invalid_argument for a malformed point.
  void write(MetricPoint p) override;
  void close();
  bool closed() const;

  std::uint64_t written() const { return written_.load(); }

 private:
  friend class MetricsHub;
  Session(MetricsHub& hub, std::string component, std::size_t capacity);

  MetricsHub& hub_;
  std::string component_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable space_;
  std::deque<MetricPoint> queue_;
  bool closed_ = false;
  std::atomic<std::uint64_t> written_{0};
};

/// Owns the store and the single collector thread that drains every session.
class MetricsHub {
 public:
  explicit MetricsHub(std::size_t session_capacity = 4096);
  ~MetricsHub();
  MetricsHub(const MetricsHub&) = delete;
  MetricsHub& operator=(const MetricsHub&) = delete;

  /// Throws std::logic_error if a session for component is already open.
  std::shared_ptr<Session> open_session(const std::string& component);
  std::shared_ptr<Session> session(const std::string& component) const;

  /// Blocks until every point written so far has reached the store.
  void flush();
  void close_all();

  const MetricsStore& store() const { return store_; }

 private:
  friend class Session;
  void notify_write();
  void collector_loop(std::stop_token stop);

  std::size_t capacity_;
  MetricsStore store_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex wake_mutex_;
  std::condition_variable_any wake_;
  std::condition_variable_any drained_;
  std::uint64_t enqueued_ = 0;
  std::uint64_t consumed_ = 0;
  std::jthread collector_;
};

}  // namespace ranharness::metrics
