#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ranharness/common/clock.hpp"
#include "ranharness/config/plan.hpp"
#include "ranharness/controller/log_bus.hpp"
#include "ranharness/controller/status.hpp"

namespace ranharness::controller {

struct RunnerContext {
  const config::ComponentSpec& spec;
  std::uint64_t seed = 0;
  std::uint32_t restarts = 0;
  std::function<void(LogLevel, std::string)> log;
};

/// Hosts one component on behalf of its worker thread.
class Runner {
 public:
  virtual ~Runner() = default;
  /// Brings the component up. An error message makes it Failed.
  virtual std::optional<std::string> start(const RunnerContext& ctx) = 0;
  virtual void stop() = 0;
  /// A runner that reports false stops heartbeating.
  virtual bool alive() const { return true; }
};

class RunnerFactory {
 public:
  virtual ~RunnerFactory() = default;
  virtual std::unique_ptr<Runner> make(const config::ComponentSpec& spec) = 0;
};

/// What a workload may ask of the run it belongs to.
class RunControl {
 public:
  virtual ~RunControl() = default;
  virtual bool stop_requested() const = 0;
  /// Marks a component Failed from outside its worker.
  virtual void report_failure(const std::string& component, const std::string& reason) = 0;
  virtual void log(const std::string& component, LogLevel level, std::string message,
                   std::optional<std::uint64_t> slot = std::nullopt) = 0;
};

/// Work performed by the controller thread once startup has settled.
class Workload {
 public:
  virtual ~Workload() = default;
  virtual void run(RunControl& control) = 0;
  virtual void request_stop() = 0;
  /// Called once after every worker has been joined.
  virtual void finalize() {}
};

struct ControllerOptions {
  std::chrono::nanoseconds heartbeat_interval = std::chrono::milliseconds(500);
  std::chrono::nanoseconds start_timeout = std::chrono::seconds(10);
  std::chrono::nanoseconds stop_timeout = std::chrono::seconds(5);
  std::chrono::nanoseconds poll = std::chrono::milliseconds(20);
  std::size_t log_capacity = 65536;
  /// Heartbeat and log time source; defaults to the system clock.
  std::shared_ptr<const Clock> clock;
  /// Run a supervisor thread. Tests that drive supervise_once() turn it off.
  bool supervise = true;
  /// Called for every status change, in order.
  std::function<void(const Transition&)> observer;
};

enum class Fault { silence, kill };

struct ComponentReport {
  std::string name;
  std::string kind;
  ComponentStatus status;
};

struct RunReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::int64_t started_at_ns = 0;
  std::int64_t finished_at_ns = 0;
  std::vector<ComponentReport> components;
  std::uint64_t heartbeats = 0;
  std::uint64_t restarts = 0;
  std::uint64_t log_records = 0;
  std::vector<std::string> exports;
  std::optional<std::uint64_t> event_digest;

  bool any_failed() const;
};

class Run;
using RunHandle = std::shared_ptr<Run>;

/// One supervised execution of a plan: a worker thread per component, a
/// controller thread for staged startup and the workload, and an optional
/// supervisor thread.
class Run final : public RunControl {
 public:
  ~Run() override;

  ComponentStatus status(const std::string& component) const;
  std::map<std::string, ComponentStatus> statuses() const;
  std::vector<Transition> transitions() const;

  void heartbeat(const std::string& component);
  /// One supervision pass: Degraded after 3 missed intervals, Failed after 6.
  void supervise_once();

  /// Only a Failed component can be restarted. Throws std::logic_error
  /// ("not restartable") otherwise.
  ComponentStatus restart(const std::string& component);
  void inject_fault(const std::string& component, Fault fault);

  bool wait_startup(std::chrono::nanoseconds timeout) const;
  bool wait_workload(std::chrono::nanoseconds timeout) const;
  bool workload_done() const;
  /// Blocks until the component reaches state or the timeout passes.
  bool wait_for_state(const std::string& component, State state,
                      std::chrono::nanoseconds timeout) const;

  std::vector<LogRecord> drain_logs();
  std::size_t live_workers() const { return live_workers_.load(); }
  const config::ExecutionPlan& plan() const { return plan_; }
  const Clock& clock() const { return *clock_; }

  RunReport stop();

  bool stop_requested() const override { return stop_requested_.load(); }
  void report_failure(const std::string& component, const std::string& reason) override;
  void log(const std::string& component, LogLevel level, std::string message,
           std::optional<std::uint64_t> slot = std::nullopt) override;

 private:
  friend RunHandle start_run(const config::ExecutionPlan&, RunnerFactory&, ControllerOptions,
                             Workload*);

  enum class Command { start, restart, stop, kill };

  struct Worker {
    std::string name;
    const config::ComponentSpec* spec = nullptr;
    std::mutex mu;
    std::condition_variable_any cv;
    std::deque<Command> mailbox;
    std::unique_ptr<Runner> runner;
    std::atomic<bool> silenced{false};
    std::jthread thread;
  };

  Run(const config::ExecutionPlan& plan, RunnerFactory& factory, ControllerOptions options,
      Workload* workload);

  void launch();
  void worker_main(Worker& w, std::stop_token stop);
  void controller_main();
  void supervisor_main(std::stop_token stop);
  void send(Worker& w, Command c);
  bool transition(const std::string& component, State to, std::optional<std::string> reason = {});
  bool transition_locked(const std::string& component, State to, std::optional<std::string> reason);
  bool settled_locked(const std::string& component) const;

  config::ExecutionPlan plan_;
  RunnerFactory& factory_;
  ControllerOptions options_;
  std::shared_ptr<const Clock> clock_;
  Workload* workload_;
  LogBus logs_;

  mutable std::mutex mu_;
  mutable std::condition_variable_any changed_;
  std::map<std::string, ComponentStatus> status_;
  std::vector<Transition> transitions_;
  std::int64_t last_ts_ = 0;
  std::uint64_t seq_ = 0;
  bool startup_done_ = false;
  bool workload_done_ = false;
  bool stopped_ = false;
  std::int64_t started_at_ns_ = 0;
  std::optional<RunReport> report_;

  std::map<std::string, std::unique_ptr<Worker>> workers_;
  std::atomic<bool> stop_requested_{false};
  std::atomic<std::size_t> live_workers_{0};
  std::jthread controller_;
  std::jthread supervisor_;
};

/// Spawns one worker per component and starts staged startup in the
/// background. The workload, if any, runs on the controller thread after
/// startup. factory and workload must outlive the run.
RunHandle start_run(const config::ExecutionPlan& plan, RunnerFactory& factory,
                    ControllerOptions options = {}, Workload* workload = nullptr);

/// Stops components in reverse stage order, joins every worker, finalizes the
/// workload and returns the report. Safe to call more than once.
RunReport stop_run(const RunHandle& run);

std::vector<LogRecord> drain_logs(const RunHandle& run);

}  // namespace ranharness::controller
