#include <atomic>
#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace ranharness;

  CLI::App app{"ranharness: declarative RAN attack scenarios on a slot simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ranharness 0.1.0");

  std::string file;
  auto* validate = app.add_subcommand("validate", "Check a scenario and print every diagnostic");
  validate->add_option("file", file, "Scenario YAML")->required();

  auto* plan = app.add_subcommand("plan", "Print the staged startup order");
  plan->add_option("file", file, "Scenario YAML")->required();

  cli::RunOptions run_options;
  std::string outdir;
  std::uint64_t seed = 0;
  std::uint32_t duration = 0;
  std::vector<std::string> kills;
  auto* run = app.add_subcommand("run", "Execute a scenario and write report.json, run.log, metrics.csv");
  run->add_option("file", file, "Scenario YAML")->required();
  auto* outdir_opt = run->add_option("--outdir", outdir, "Output directory (default runs/<id>-<seed>)");
  auto* seed_opt = run->add_option("--seed-override", seed, "Replace the scenario seed");
  auto* duration_opt =
      run->add_option("--duration-override", duration, "Replace duration_slots")->check(CLI::PositiveNumber);
  run->add_option("--inject-kill", kills, "Kill NAME at SLOT (NAME@SLOT)")->group("");
  run->add_flag("--trace", run_options.trace, "Write trace.ndjson")->group("");

  std::string dir;
  auto* report = app.add_subcommand("report", "Summarize a finished run directory");
  report->add_option("dir", dir, "Run directory")->required();

  std::string format;
  auto* exp = app.add_subcommand("export", "Export a run's metrics");
  exp->add_option("dir", dir, "Run directory")->required();
  exp->add_option("--format", format, "csv or json")->required()->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kInvalid;
  }

  try {
    if (*validate) return cli::cmd_validate(file, std::cout, std::cerr);
    if (*plan) return cli::cmd_plan(file, std::cout, std::cerr);
    if (*run) {
      if (*outdir_opt) run_options.outdir = outdir;
      if (*seed_opt) run_options.seed_override = seed;
      if (*duration_opt) run_options.duration_override = duration;
      for (const auto& k : kills) {
        auto parsed = cli::parse_kill(k);
        if (!parsed) {
          std::cerr << "error: --inject-kill expects NAME@SLOT, got '" << k << "'\n";
          return cli::kInvalid;
        }
        run_options.kills.push_back(*parsed);
      }
      std::signal(SIGINT, on_sigint);
      run_options.interrupt = &g_interrupted;
      return cli::cmd_run(file, run_options, std::cout, std::cerr);
    }
    if (*report) return cli::cmd_report(dir, std::cout, std::cerr);
    if (*exp)
      return cli::cmd_export(dir, *metrics::parse_export_format(format), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kInternal;
  }
  return cli::kInternal;
}
