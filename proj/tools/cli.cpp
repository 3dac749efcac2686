#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "crossguard/errors.hpp"
#include "crossguard/monte_carlo.hpp"
#include "crossguard/simulator.hpp"
#include "crossguard/tables.hpp"

namespace crossguard::cli {
namespace {

namespace fs = std::filesystem;

void configure_logging(std::ostream& err) {
  static bool configured = false;
  if (!configured) {
    spdlog::set_default_logger(std::make_shared<spdlog::logger>(
        "crossguard", std::make_shared<spdlog::sinks::stderr_sink_mt>()));
    configured = true;
  }
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("CROSSGUARD_LOG_LEVEL")) {
    const std::string text(level);
    if (text == "error" || text == "warn" || text == "info" || text == "debug") {
      spdlog::set_level(spdlog::level::from_str(text));
    } else {
      err << "ignoring CROSSGUARD_LOG_LEVEL=" << text << " (expected error, warn, info or debug)\n";
    }
  }
}

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::string log_path,
            std::string report_path, bool realtime, std::ostream& out, std::ostream& err) {
  const Scenario scenario = load_scenario(path);
  const auto stem = fs::path(path).stem().string();
  if (log_path.empty()) log_path = stem + ".jsonl";
  if (report_path.empty()) report_path = stem + ".report.json";

  RunOptions options;
  options.seed_override = seed;
  options.realtime = realtime;
  const auto result = run(scenario, options);

  if (!write_file(log_path, result.log.to_jsonl(), err)) return kOutput;
  if (!write_file(report_path, result.report.to_json().dump(2) + "\n", err)) return kOutput;

  const auto& r = result.report;
  out << "scenario " << r.scenario_id << " seed " << r.seed << ": " << r.trains.size()
      << " arrivals, " << r.messages.size() << " messages, " << r.violations.size()
      << " violations\n";
  for (const auto& t : r.trains) {
    out << "  " << t.train_id << " arrival " << to_seconds(t.arrival) << " s, margin ";
    if (t.margin_s) {
      out << *t.margin_s << " s";
    } else {
      out << "none";
    }
    out << (t.safe ? "" : "  UNSAFE") << "\n";
  }
  out << "log " << log_path << "\nreport " << report_path << "\n";
  return r.safe() ? kOk : kSafety;
}

int cmd_montecarlo(const std::string& condition, const std::string& target, std::uint64_t trials,
                   std::uint64_t seed, int window, int hits, std::ostream& out) {
  WindowConfig cfg;
  cfg.window_len = window;
  cfg.required_hits = hits;
  const auto profile = profile_for(parse_condition(condition), parse_target(target));
  const auto r = monte_carlo(profile, cfg, trials, seed);
  Json j{{"condition", condition},
         {"class", target},
         {"per_frame", profile.true_positive_rate},
         {"window", window},
         {"hits", hits},
         {"trials", r.trials},
         {"seed", seed},
         {"confirmed", r.confirmed},
         {"estimate", r.estimate},
         {"closed_form", r.closed_form},
         {"standard_error", r.standard_error},
         {"agrees_3se", r.agrees()}};
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_tables(std::uint64_t trials, std::uint64_t seed, bool json, std::ostream& out) {
  const auto report = compute_tables(trials, seed);
  out << (json ? report.to_json().dump(2) + "\n" : report.render());
  return report.passes() ? kOk : kValidation;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto s = load_scenario(path);
  out << "ok: " << s.id << " (" << s.trains.size() << " trains, " << s.cameras.size()
      << " cameras, " << s.trespassers.size() << " trespassers, duration " << to_seconds(s.duration)
      << " s)\n";
  return kOk;
}

int cmd_replay(const std::string& path, const std::string& report_path, std::ostream& out,
               std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("path", "cannot open " + path);
  const auto log = EventLog::read_jsonl(in);
  const auto report = build_report(log);
  const auto text = report.to_json().dump(2) + "\n";
  if (report_path.empty()) {
    out << text;
  } else if (!write_file(report_path, text, err)) {
    return kOutput;
  }
  return report.safe() ? kOk : kSafety;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging(err);

  CLI::App app{"crossguard: level-crossing controller simulator", "crossguard"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed_override;
  std::string log_path;
  std::string report_path;
  bool realtime = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write the event log and report");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--seed", seed_override, "Override the scenario seed");
  run_cmd->add_option("--log", log_path, "Event log output (default <stem>.jsonl)");
  run_cmd->add_option("--report", report_path, "Report output (default <stem>.report.json)");
  run_cmd->add_flag("--realtime", realtime, "Pace the virtual clock against the wall clock");

  std::string condition = "day";
  std::string target = "train";
  std::uint64_t mc_trials = 100000;
  std::uint64_t mc_seed = 1;
  int window = 10;
  int hits = 1;
  auto* mc_cmd = app.add_subcommand("montecarlo", "Estimate windowed detection accuracy");
  mc_cmd->add_option("--condition", condition, "day|night|badweather")->required();
  mc_cmd->add_option("--class", target, "train|trespasser")->required();
  mc_cmd->add_option("--trials", mc_trials, "Number of windows")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", mc_seed, "Seed");
  mc_cmd->add_option("--window", window, "Window length n")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--hits", hits, "Required hits k")->check(CLI::PositiveNumber);

  std::uint64_t table_trials = 100000;
  std::uint64_t table_seed = 1;
  bool table_json = false;
  auto* tables_cmd = app.add_subcommand("tables", "Recompute the published accuracy tables");
  tables_cmd->add_option("--trials", table_trials, "Monte Carlo trials per row")
      ->check(CLI::PositiveNumber);
  tables_cmd->add_option("--seed", table_seed, "Seed");
  tables_cmd->add_flag("--json", table_json, "Emit JSON instead of a table");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

  std::string replay_path;
  std::string replay_report;
  auto* replay_cmd = app.add_subcommand("replay", "Rebuild the report from an event log");
  replay_cmd->add_option("log", replay_path, "Event log (JSON Lines)")->required();
  replay_cmd->add_option("--report", replay_report, "Write the report here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(scenario_path, seed_override, log_path, report_path, realtime, out, err);
    }
    if (mc_cmd->parsed()) return cmd_montecarlo(condition, target, mc_trials, mc_seed, window, hits, out);
    if (tables_cmd->parsed()) return cmd_tables(table_trials, table_seed, table_json, out);
    if (validate_cmd->parsed()) return cmd_validate(validate_path, out);
    if (replay_cmd->parsed()) return cmd_replay(replay_path, replay_report, out, err);
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const FieldError& e) {
    err << "invalid: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "invalid: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace crossguard::cli
