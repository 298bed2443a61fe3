#include "ranharness/controller/controller.hpp"

#include <algorithm>
#include <stdexcept>

#include "ranharness/config/seed.hpp"

namespace ranharness::controller {

namespace {

bool is_up(State s) { return s == State::Running || s == State::Degraded; }

template <class Dur>
auto deadline_after(Dur d) {
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
}

}  // namespace

bool RunReport::any_failed() const {
  return std::any_of(components.begin(), components.end(),
                     [](const ComponentReport& c) { return c.status.state == State::Failed; });
}

Run::Run(const config::ExecutionPlan& plan, RunnerFactory& factory, ControllerOptions options,
         Workload* workload)
    : plan_(plan),
      factory_(factory),
      options_(std::move(options)),
      clock_(options_.clock ? options_.clock : std::make_shared<SystemClock>()),
      workload_(workload),
      logs_(*clock_, options_.log_capacity) {
  if (options_.heartbeat_interval.count() <= 0)
    throw std::invalid_argument("heartbeat interval must be positive");
}

Run::~Run() {
  try {
    stop();
  } catch (...) {
  }
}

void Run::launch() {
  started_at_ns_ = clock_->now_ns();
  for (const auto& c : plan_.spec.components) {
    status_[c.name] = ComponentStatus{};
    auto w = std::make_unique<Worker>();
    w->name = c.name;
    w->spec = &c;
    workers_.emplace(c.name, std::move(w));
  }
  for (auto& [_, w] : workers_) {
    Worker* raw = w.get();
    raw->thread = std::jthread([this, raw](std::stop_token st) { worker_main(*raw, st); });
  }
  log("controller", LogLevel::info,
      "run started: " + std::to_string(plan_.spec.components.size()) + " components in " +
          std::to_string(plan_.stages.size()) + " stages");
  controller_ = std::jthread([this] { controller_main(); });
  if (options_.supervise)
    supervisor_ = std::jthread([this](std::stop_token st) { supervisor_main(st); });
}

void Run::send(Worker& w, Command c) {
  std::lock_guard lock(w.mu);
  w.mailbox.push_back(c);
  w.cv.notify_all();
}

bool Run::transition_locked(const std::string& component, State to,
                            std::optional<std::string> reason) {
  auto it = status_.find(component);
  if (it == status_.end()) return false;
  ComponentStatus& st = it->second;
  if (!legal_transition(st.state, to)) return false;
  if (to == State::Failed && (!reason || reason->empty())) reason = "unspecified failure";

  const std::int64_t now = clock_->now_ns();
  const std::int64_t ts = std::max(now, last_ts_ + 1);
  last_ts_ = ts;
  Transition tr{component, st.state, to, reason, ts, seq_++};
  st.state = to;
  if (to == State::Starting || to == State::Running)
    st.reason.reset();
  else if (reason)
    st.reason = reason;
  if (to == State::Running && tr.from != State::Degraded) st.last_heartbeat_ns = now;
  transitions_.push_back(tr);
  if (options_.observer) options_.observer(tr);
  changed_.notify_all();
  return true;
}

bool Run::transition(const std::string& component, State to, std::optional<std::string> reason) {
  Transition tr;
  {
    std::lock_guard lock(mu_);
    if (!transition_locked(component, to, std::move(reason))) return false;
    tr = transitions_.back();
  }
  std::string msg = to_string(tr.from) + " -> " + to_string(tr.to);
  if (tr.reason) msg += ": " + *tr.reason;
  log(component, tr.to == State::Failed ? LogLevel::error : LogLevel::info, std::move(msg));
  return true;
}

bool Run::settled_locked(const std::string& component) const {
  return status_.at(component).state != State::Starting;
}

void Run::worker_main(Worker& w, std::stop_token stop) {
  ++live_workers_;
  struct Leave {
    std::atomic<std::size_t>& n;
    ~Leave() { --n; }
  } leave{live_workers_};

  std::int64_t last_sent = 0;
  while (true) {
    std::optional<Command> cmd;
    {
      std::unique_lock lock(w.mu);
      w.cv.wait_for(lock, stop, options_.poll, [&] { return !w.mailbox.empty(); });
      if (!w.mailbox.empty()) {
        cmd = w.mailbox.front();
        w.mailbox.pop_front();
      } else if (stop.stop_requested()) {
        return;
      }
    }

    if (cmd) {
      switch (*cmd) {
        case Command::start:
        case Command::restart: {
          if (w.runner) {
            w.runner->stop();
            w.runner.reset();
          }
          const std::uint32_t restarts = status(w.name).restarts;
          RunnerContext ctx{*w.spec, config::restart_seed(plan_.spec.seed, w.name, restarts),
                            restarts,
                            [this, name = w.name](LogLevel l, std::string m) {
                              log(name, l, std::move(m));
                            }};
          std::optional<std::string> err;
          try {
            w.runner = factory_.make(*w.spec);
            if (!w.runner)
              err = "no runner for kind '" + w.spec->kind + "'";
            else
              err = w.runner->start(ctx);
          } catch (const std::exception& e) {
            err = e.what();
          }
          if (err) {
            transition(w.name, State::Failed, *err);
          } else {
            last_sent = clock_->now_ns();
            transition(w.name, State::Running);
          }
          break;
        }
        case Command::stop:
          if (w.runner) w.runner->stop();
          transition(w.name, State::Stopped);
          return;
        case Command::kill:
          if (w.runner) w.runner->stop();
          transition(w.name, State::Failed, "killed by fault injection");
          break;
      }
    }

    const State s = status(w.name).state;
    if (is_up(s) && !w.silenced.load() && w.runner && w.runner->alive()) {
      const std::int64_t now = clock_->now_ns();
      if (now - last_sent >= options_.heartbeat_interval.count()) {
        heartbeat(w.name);
        last_sent = now;
      }
    }
  }
}

void Run::controller_main() {
  for (const auto& stage : plan_.stages) {
    if (stop_requested()) break;
    std::vector<std::string> launched;
    for (const auto& name : stage) {
      const auto* spec = plan_.spec.find(name);
      bool deps_up = true;
      {
        std::lock_guard lock(mu_);
        for (const auto& d : spec->depends_on)
          if (!is_up(status_.at(d).state)) deps_up = false;
        if (!deps_up) {
          status_[name].reason = "dependency failed";
          changed_.notify_all();
        }
      }
      if (!deps_up) {
        log(name, LogLevel::warn, "left Pending: dependency failed");
        continue;
      }
      if (transition(name, State::Starting)) {
        launched.push_back(name);
        send(*workers_.at(name), Command::start);
      }
    }

    std::vector<std::string> timed_out;
    {
      std::unique_lock lock(mu_);
      changed_.wait_until(lock, deadline_after(options_.start_timeout), [&] {
        if (stop_requested()) return true;
        return std::all_of(launched.begin(), launched.end(),
                           [&](const std::string& n) { return settled_locked(n); });
      });
      for (const auto& n : launched) {
        if (!settled_locked(n) && transition_locked(n, State::Failed, "start timeout"))
          timed_out.push_back(n);
      }
    }
    for (const auto& n : timed_out) log(n, LogLevel::error, "Starting -> Failed: start timeout");
  }
  {
    std::lock_guard lock(mu_);
    startup_done_ = true;
    changed_.notify_all();
  }
  log("controller", LogLevel::info, "startup complete");

  if (workload_ && !stop_requested()) {
    try {
      workload_->run(*this);
    } catch (const std::exception& e) {
      log("controller", LogLevel::error, std::string("workload error: ") + e.what());
    }
  }
  std::lock_guard lock(mu_);
  workload_done_ = true;
  changed_.notify_all();
}

void Run::supervisor_main(std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  while (!stop.stop_requested()) {
    supervise_once();
    std::unique_lock lock(m);
    cv.wait_for(lock, stop, options_.poll, [] { return false; });
  }
}

void Run::supervise_once() {
  const std::int64_t now = clock_->now_ns();
  const std::int64_t interval = options_.heartbeat_interval.count();
  std::vector<Transition> changed;
  {
    std::lock_guard lock(mu_);
    for (auto& [name, st] : status_) {
      if (!is_up(st.state)) continue;
      const std::int64_t missed = (now - st.last_heartbeat_ns) / interval;
      bool moved = false;
      if (missed >= 6)
        moved = transition_locked(name, State::Failed, "heartbeat lost");
      else if (missed >= 3 && st.state == State::Running)
        moved = transition_locked(name, State::Degraded, "missed " + std::to_string(missed) +
                                                             " heartbeats");
      if (moved) changed.push_back(transitions_.back());
    }
  }
  for (const auto& tr : changed) {
    std::string msg = to_string(tr.from) + " -> " + to_string(tr.to);
    if (tr.reason) msg += ": " + *tr.reason;
    log(tr.component, tr.to == State::Failed ? LogLevel::error : LogLevel::warn, std::move(msg));
  }
}

void Run::heartbeat(const std::string& component) {
  bool known = false;
  bool recovered = false;
  {
    std::lock_guard lock(mu_);
    auto it = status_.find(component);
    if (it != status_.end()) {
      known = true;
      ComponentStatus& st = it->second;
      if (is_up(st.state)) {
        st.last_heartbeat_ns = clock_->now_ns();
        ++st.heartbeats;
        if (st.state == State::Degraded) recovered = transition_locked(component, State::Running, {});
      }
    }
  }
  if (!known) log("controller", LogLevel::warn, "heartbeat from unknown component '" + component + "'");
  if (recovered) log(component, LogLevel::info, "Degraded -> Running");
}

ComponentStatus Run::status(const std::string& component) const {
  std::lock_guard lock(mu_);
  auto it = status_.find(component);
  if (it == status_.end()) throw std::out_of_range("unknown component '" + component + "'");
  return it->second;
}

std::map<std::string, ComponentStatus> Run::statuses() const {
  std::lock_guard lock(mu_);
  return status_;
}

std::vector<Transition> Run::transitions() const {
  std::lock_guard lock(mu_);
  return transitions_;
}

ComponentStatus Run::restart(const std::string& component) {
  ComponentStatus result;
  {
    std::lock_guard lock(mu_);
    auto it = status_.find(component);
    if (it == status_.end()) throw std::out_of_range("unknown component '" + component + "'");
    if (stopped_) throw std::logic_error("not restartable: run stopped");
    if (it->second.state != State::Failed) {
      throw std::logic_error(it->second.state == State::Stopped
                                 ? "not restartable: Stopped is terminal"
                                 : "not restartable");
    }
    ++it->second.restarts;
    transition_locked(component, State::Starting, {});
    result = it->second;
  }
  log(component, LogLevel::info, "Failed -> Starting (restart " + std::to_string(result.restarts) + ")");
  auto& w = *workers_.at(component);
  w.silenced = false;
  send(w, Command::restart);
  return result;
}

void Run::inject_fault(const std::string& component, Fault fault) {
  auto it = workers_.find(component);
  if (it == workers_.end()) throw std::out_of_range("unknown component '" + component + "'");
  if (fault == Fault::silence) {
    it->second->silenced = true;
    log(component, LogLevel::warn, "fault injected: silence");
  } else {
    log(component, LogLevel::warn, "fault injected: kill");
    send(*it->second, Command::kill);
  }
}

void Run::report_failure(const std::string& component, const std::string& reason) {
  transition(component, State::Failed, reason);
}

void Run::log(const std::string& component, LogLevel level, std::string message,
              std::optional<std::uint64_t> slot) {
  logs_.log(component, level, std::move(message), slot);
}

bool Run::wait_startup(std::chrono::nanoseconds timeout) const {
  std::unique_lock lock(mu_);
  return changed_.wait_until(lock, deadline_after(timeout), [&] { return startup_done_; });
}

bool Run::wait_workload(std::chrono::nanoseconds timeout) const {
  std::unique_lock lock(mu_);
  return changed_.wait_until(lock, deadline_after(timeout), [&] { return workload_done_; });
}

bool Run::workload_done() const {
  std::lock_guard lock(mu_);
  return workload_done_;
}

bool Run::wait_for_state(const std::string& component, State state,
                         std::chrono::nanoseconds timeout) const {
  std::unique_lock lock(mu_);
  return changed_.wait_until(lock, deadline_after(timeout),
                             [&] { return status_.at(component).state == state; });
}

std::vector<LogRecord> Run::drain_logs() { return logs_.drain(); }

RunReport Run::stop() {
  {
    std::lock_guard lock(mu_);
    if (report_) return *report_;
  }
  stop_requested_ = true;
  {
    std::lock_guard lock(mu_);
    changed_.notify_all();
  }
  if (workload_) workload_->request_stop();
  if (controller_.joinable()) controller_.join();
  if (supervisor_.joinable()) {
    supervisor_.request_stop();
    supervisor_.join();
  }

  for (auto stage = plan_.stages.rbegin(); stage != plan_.stages.rend(); ++stage) {
    for (auto name = stage->rbegin(); name != stage->rend(); ++name) {
      const ComponentStatus st = status(*name);
      if (st.state == State::Pending) {
        if (!st.reason) transition(*name, State::Stopped, "not started");
        continue;
      }
      if (st.state != State::Running && st.state != State::Degraded && st.state != State::Starting)
        continue;
      send(*workers_.at(*name), Command::stop);
      bool done;
      {
        std::unique_lock lock(mu_);
        done = changed_.wait_until(lock, deadline_after(options_.stop_timeout), [&] {
          const State s = status_.at(*name).state;
          return s != State::Running && s != State::Degraded && s != State::Starting;
        });
      }
      if (!done) transition(*name, State::Failed, "stop timeout");
    }
  }

  for (auto& [_, w] : workers_) w->thread.request_stop();
  for (auto& [_, w] : workers_)
    if (w->thread.joinable()) w->thread.join();
  for (auto& [_, w] : workers_) w->runner.reset();
  if (workload_) workload_->finalize();

  log("controller", LogLevel::info, "run stopped");

  RunReport report;
  report.scenario_id = plan_.spec.id;
  report.seed = plan_.spec.seed;
  report.started_at_ns = started_at_ns_;
  report.finished_at_ns = clock_->now_ns();
  {
    std::lock_guard lock(mu_);
    for (const auto& c : plan_.spec.components) {
      const auto& st = status_.at(c.name);
      report.components.push_back({c.name, c.kind, st});
      report.heartbeats += st.heartbeats;
      report.restarts += st.restarts;
    }
    stopped_ = true;
  }
  report.log_records = logs_.total();
  std::lock_guard lock(mu_);
  report_ = report;
  return report;
}

RunHandle start_run(const config::ExecutionPlan& plan, RunnerFactory& factory,
                    ControllerOptions options, Workload* workload) {
  RunHandle run(new Run(plan, factory, std::move(options), workload));
  run->launch();
  return run;
}

RunReport stop_run(const RunHandle& run) { return run->stop(); }

std::vector<LogRecord> drain_logs(const RunHandle& run) { return run->drain_logs(); }

}  // namespace ranharness::controller
