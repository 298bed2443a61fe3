#include "ranharness/metrics/hub.hpp"

#include <stdexcept>
#include <vector>

namespace ranharness::metrics {

Session::Session(MetricsHub& hub, std::string component, std::size_t capacity)
    : hub_(hub), component_(std::move(component)), capacity_(capacity) {}

void Session::write(MetricPoint p) {
  p.tags["component"] = component_;
  if (auto why = check_point(p); !why.empty()) throw std::invalid_argument(why);
  {
    std::unique_lock lock(mutex_);
    space_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
    if (closed_) throw std::logic_error("session closed");
    queue_.push_back(std::move(p));
  }
  ++written_;
  hub_.notify_write();
}

void Session::close() {
  std::lock_guard lock(mutex_);
  closed_ = true;
  space_.notify_all();
}

bool Session::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

MetricsHub::MetricsHub(std::size_t session_capacity)
    : capacity_(session_capacity == 0 ? 1 : session_capacity),
      collector_([this](std::stop_token st) { collector_loop(st); }) {}

MetricsHub::~MetricsHub() {
  flush();
  collector_.request_stop();
  collector_.join();
}

std::shared_ptr<Session> MetricsHub::open_session(const std::string& component) {
  std::lock_guard lock(sessions_mutex_);
  auto& slot = sessions_[component];
  if (slot) throw std::logic_error("session already open for component " + component);
  slot.reset(new Session(*this, component, capacity_));
  return slot;
}

std::shared_ptr<Session> MetricsHub::session(const std::string& component) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(component);
  return it == sessions_.end() ? nullptr : it->second;
}

void MetricsHub::flush() {
  std::unique_lock lock(wake_mutex_);
  drained_.wait(lock, [&] { return consumed_ == enqueued_; });
}

void MetricsHub::close_all() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(sessions_mutex_);
    for (auto& [_, s] : sessions_) all.push_back(s);
  }
  for (auto& s : all) s->close();
  flush();
}

void MetricsHub::notify_write() {
  std::lock_guard lock(wake_mutex_);
  ++enqueued_;
  wake_.notify_one();
}

void MetricsHub::collector_loop(std::stop_token stop) {
  std::vector<std::shared_ptr<Session>> sessions;
  std::deque<MetricPoint> batch;
  while (true) {
    {
      std::unique_lock lock(wake_mutex_);
      wake_.wait(lock, stop, [&] { return consumed_ < enqueued_; });
      if (consumed_ == enqueued_ && stop.stop_requested()) return;
    }
    sessions.clear();
    {
      std::lock_guard lock(sessions_mutex_);
      for (auto& [_, s] : sessions_) sessions.push_back(s);
    }
    std::uint64_t moved = 0;
    for (auto& s : sessions) {
      {
        std::lock_guard lock(s->mutex_);
        batch.swap(s->queue_);
        s->space_.notify_all();
      }
      for (const auto& p : batch) store_.insert(p);
      moved += batch.size();
      batch.clear();
    }
    std::lock_guard lock(wake_mutex_);
    consumed_ += moved;
    drained_.notify_all();
  }
}

}  // namespace ranharness::metrics
