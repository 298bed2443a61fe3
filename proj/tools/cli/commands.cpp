#include "commands.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>
#include <algorithm>

#include "ranharness/common/format.hpp"
#include "ranharness/config/plan.hpp"
#include "ranharness/config/scenario.hpp"
#include "ranharness/controller/report.hpp"
#include "ranharness/metrics/store.hpp"

namespace ranharness::cli {

namespace fs = std::filesystem;

namespace {

// Reads the whole file, reporting the OS cause on failure.
std::optional<std::string> read_file(const fs::path& path, std::ostream& err) {
  errno = 0;
  std::ifstream in(path, std::ios::binary);
  if (!in || fs::is_directory(path)) {
    const int e = errno ? errno : (fs::is_directory(path) ? EISDIR : ENOENT);
    err << "error: cannot read " << path.string() << ": " << std::strerror(e) << '\n';
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) err << d << '\n';
}

struct Loaded {
  config::ScenarioSpec spec;
  config::ExecutionPlan plan;
};

// Parse, validate and plan. Returns the exit code on failure.
std::variant<Loaded, int> load(const std::string& path, std::ostream& err,
                               const RunOptions* overrides = nullptr) {
  auto text = read_file(path, err);
  if (!text) return kInternal;
  auto parsed = config::parse_scenario(*text);
  if (!parsed) {
    print_diagnostics(parsed.diagnostics, err);
    return kInvalid;
  }
  config::ScenarioSpec spec = *parsed;
  if (overrides) {
    if (overrides->seed_override) spec.seed = *overrides->seed_override;
    if (overrides->duration_override) spec.duration_slots = *overrides->duration_override;
  }
  auto plan = config::build_plan(spec);
  if (!plan) {
    print_diagnostics(plan.diagnostics, err);
    return kInvalid;
  }
  return Loaded{std::move(spec), std::move(*plan)};
}

bool write_text(const fs::path& path, const std::string& text, std::ostream& err) {
  errno = 0;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) out << text;
  if (!out) {
    err << "error: cannot write " << path.string() << ": " << std::strerror(errno ? errno : EIO)
        << '\n';
    return false;
  }
  return true;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::optional<controller::KillAt> parse_kill(const std::string& text) {
  const auto at = text.rfind('@');
  if (at == std::string::npos || at == 0 || at + 1 == text.size()) return std::nullopt;
  controller::KillAt k{text.substr(0, at), 0};
  const std::string slot = text.substr(at + 1);
  if (slot.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  try {
    k.slot = std::stoull(slot);
  } catch (...) {
    return std::nullopt;
  }
  return k;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  auto r = load(path, err);
  if (auto* code = std::get_if<int>(&r)) return *code;
  const auto& loaded = std::get<Loaded>(r);
  out << "OK: " << loaded.spec.id << " (" << loaded.spec.components.size() << " components, "
      << loaded.plan.stages.size() << " stages)\n";
  return kOk;
}

int cmd_plan(const std::string& path, std::ostream& out, std::ostream& err) {
  auto r = load(path, err);
  if (auto* code = std::get_if<int>(&r)) return *code;
  const auto& loaded = std::get<Loaded>(r);
  out << "scenario " << loaded.spec.id << " seed " << loaded.spec.seed << " duration "
      << loaded.spec.duration_slots << " slots\n";
  for (std::size_t s = 0; s < loaded.plan.stages.size(); ++s) {
    out << "stage " << s << ":";
    for (const auto& name : loaded.plan.stages[s])
      out << ' ' << name << " (" << loaded.spec.find(name)->kind << ")";
    out << '\n';
  }
  return kOk;
}

int cmd_run(const std::string& path, const RunOptions& options, std::ostream& out,
            std::ostream& err) {
  auto r = load(path, err, &options);
  if (auto* code = std::get_if<int>(&r)) return *code;
  auto& loaded = std::get<Loaded>(r);
  for (const auto& k : options.kills) {
    if (!loaded.spec.find(k.component)) {
      err << "error: --inject-kill names unknown component '" << k.component << "'\n";
      return kInvalid;
    }
  }

  const fs::path outdir =
      options.outdir ? *options.outdir
                     : fs::path("runs") / (loaded.spec.id + "-" + std::to_string(loaded.spec.seed));
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) {
    err << "error: cannot create " << outdir.string() << ": " << ec.message() << '\n';
    return kInternal;
  }

  std::ofstream trace;
  controller::RuntimeOptions rt_options;
  rt_options.artifact_dir = outdir;
  rt_options.kills = options.kills;
  if (options.trace) {
    trace.open(outdir / "trace.ndjson", std::ios::binary | std::ios::trunc);
    if (!trace) {
      err << "error: cannot write " << (outdir / "trace.ndjson").string() << '\n';
      return kInternal;
    }
    rt_options.trace = &trace;
  }

  controller::RunReport report;
  std::vector<controller::LogRecord> logs;
  std::uint64_t digest = 0;
  metrics::MetricsStore store;
  try {
    controller::ScenarioRuntime runtime(loaded.spec, rt_options);
    auto run = controller::start_run(loaded.plan, runtime, options.controller, &runtime);
    while (!run->wait_workload(std::chrono::milliseconds(20))) {
      if (options.interrupt && options.interrupt->load()) {
        run->log("controller", controller::LogLevel::warn, "interrupt received, stopping");
        break;
      }
    }
    report = controller::stop_run(run);
    logs = controller::drain_logs(run);
    digest = runtime.digest();
    store = runtime.store();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }

  std::string log_text;
  for (const auto& rec : logs) log_text += controller::to_json_line(rec) + "\n";
  if (!write_text(outdir / "run.log", log_text, err)) return kInternal;

  try {
    metrics::export_store(store, metrics::ExportFormat::csv, outdir / "metrics.csv");
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  report.exports.push_back("metrics.csv");
  for (const auto& c : loaded.spec.components)
    if (c.kind == config::kinds::iq_collector) report.exports.push_back("iq_" + c.name + ".csv");
  report.event_digest = digest;
  if (!write_text(outdir / "report.json", controller::to_json(report), err)) return kInternal;

  std::size_t failed = 0;
  for (const auto& c : report.components) {
    if (c.status.state != controller::State::Failed) continue;
    ++failed;
    err << "component " << c.name << " Failed: " << c.status.reason.value_or("") << '\n';
  }
  out << "run " << loaded.spec.id << " seed " << loaded.spec.seed << ": "
      << report.components.size() << " components, " << failed << " failed, digest "
      << hex64(digest) << "\n"
      << "outputs in " << outdir.string() << '\n';
  return failed ? kComponentFailure : kOk;
}

int cmd_report(const fs::path& dir, std::ostream& out, std::ostream& err) {
  auto report_text = read_file(dir / "report.json", err);
  if (!report_text) return kInternal;
  controller::RunReport report;
  metrics::MetricsStore store;
  try {
    report = controller::parse_report(*report_text);
    store = metrics::import_store(dir / "metrics.csv");
  } catch (const std::exception& e) {
    err << "error: incomplete run directory " << dir.string() << ": " << e.what() << '\n';
    return kInternal;
  }

  out << "scenario " << report.scenario_id << " seed " << report.seed;
  if (report.event_digest) out << " digest " << hex64(*report.event_digest);
  out << "\nwall time " << fixed(double(report.finished_at_ns - report.started_at_ns) / 1e9)
      << " s, heartbeats " << report.heartbeats << ", restarts " << report.restarts
      << ", log records " << report.log_records << "\n\ncomponents (" << report.components.size()
      << "):\n";
  for (const auto& c : report.components) {
    out << "  " << std::left << std::setw(12) << c.name << std::setw(14) << c.kind
        << std::setw(10) << controller::to_string(c.status.state) << "restarts "
        << c.status.restarts;
    if (c.status.reason) out << "  (" << *c.status.reason << ")";
    out << '\n';
  }
  out << std::right;

  const auto whole = [](std::string measurement, metrics::Aggregation agg, metrics::Tags filter) {
    metrics::Query q;
    q.measurement = std::move(measurement);
    q.tag_filter = std::move(filter);
    q.agg = agg;
    if (agg != metrics::Aggregation::raw) q.window = UINT64_MAX;
    return q;
  };

  out << "\nattack summary:\n";
  bool any = false;
  for (const auto& c : report.components) {
    const metrics::Tags tag{{"component", c.name}};
    if (c.kind == config::kinds::rrc_fuzzer) {
      for (const auto& s : store.query(whole("rrc_attempt", metrics::Aggregation::raw, tag))) {
        const auto& succ = s.fields.at("success");
        double total = 0;
        for (const auto& v : succ) total += v.value;
        const std::string k = s.tags.count("k") ? s.tags.at("k") : "?";
        out << "  " << c.name << ": k=" << k << " successes " << total << "/" << succ.size()
            << " (rate " << fixed(total / double(succ.size())) << ")\n";
        any = true;
      }
    } else if (c.kind == config::kinds::ue) {
      for (const auto& s : store.query(whole("sinr", metrics::Aggregation::mean, tag))) {
        const auto& mean = s.fields.at("sinr_db").front().value;
        const auto count =
            store.query(whole("sinr", metrics::Aggregation::count, tag)).front().fields.at("sinr_db").front().value;
        out << "  " << c.name << ": mean SINR " << fixed(mean) << " dB over " << count
            << " slots\n";
        any = true;
      }
    } else if (c.kind == config::kinds::rach_flooder) {
      std::vector<std::uint64_t> flood_slots;
      for (const auto& s : store.query(whole("flood_sent", metrics::Aggregation::raw, tag)))
        for (const auto& v : s.fields.at("preambles")) flood_slots.push_back(v.slot);
      std::uint64_t attempts = 0, blocked = 0;
      for (const auto& s : store.query(whole("rach_attempt", metrics::Aggregation::raw, {}))) {
        for (const auto& v : s.fields.at("granted")) {
          if (!std::binary_search(flood_slots.begin(), flood_slots.end(), v.slot)) continue;
          ++attempts;
          if (v.value == 0) ++blocked;
        }
      }
      out << "  " << c.name << ": " << flood_slots.size() << " flooded occasions, UE attach attempts "
          << attempts << ", blocked " << blocked;
      if (attempts) out << " (block rate " << fixed(double(blocked) / double(attempts)) << ")";
      out << '\n';
      any = true;
    } else if (c.kind == config::kinds::dci_sniffer) {
      double seen = 0, captured = 0;
      for (const auto& s : store.query(whole("dci_capture", metrics::Aggregation::raw, tag))) {
        for (const auto& v : s.fields.at("seen")) seen += v.value;
        for (const auto& v : s.fields.at("captured")) captured += v.value;
      }
      out << "  " << c.name << ": captured " << captured << "/" << seen << " DCIs";
      if (seen > 0) out << " (capture rate " << fixed(captured / seen, 4) << ")";
      out << '\n';
      any = true;
    } else if (c.kind == config::kinds::jammer) {
      double active = 0;
      for (const auto& s : store.query(whole("jam_active", metrics::Aggregation::raw, tag)))
        for (const auto& v : s.fields.at("active")) active += v.value;
      out << "  " << c.name << ": active for " << active << " slots\n";
      any = true;
    }
  }
  if (!any) out << "  (no attack metrics)\n";
  return kOk;
}

int cmd_export(const fs::path& dir, metrics::ExportFormat format, std::ostream& out,
               std::ostream& err) {
  const fs::path source = dir / "metrics.csv";
  metrics::MetricsStore store;
  try {
    store = metrics::import_store(source);
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    err << "error: malformed " << source.string() << ": " << e.what() << '\n';
    return kInternal;
  }
  const fs::path target =
      dir / (format == metrics::ExportFormat::csv ? "metrics.csv" : "metrics.json");
  try {
    if (target != source) metrics::export_store(store, format, target);
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  out << target.string() << '\n';
  return kOk;
}

}  // namespace ranharness::cli
