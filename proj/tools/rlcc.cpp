#include <iostream>

#include "CLI11.hpp"
#include "rlcc/harness.hpp"

namespace {

void print_summary(const rlcc::ExperimentResult& r, std::ostream& out) {
  const auto& rep = r.report;
  out << rep["experiment"].get<std::string>() << " (config " << rep["config_hash"].get<std::string>() << ")";
  if (rep["unsound"].get<bool>()) out << " UNSOUND";
  out << '\n';
  const auto& res = rep["result"];
  for (const char* key : {"accepted", "rejected", "correct", "aborted", "wrong", "violated", "n_total", "symbol",
                          "value", "source"}) {
    if (res.contains(key)) out << "  " << key << ": " << res[key].dump() << '\n';
  }
  for (const auto& a : rep["assertions"]) {
    out << (a["pass"].get<bool>() ? "  PASS " : "  FAIL ") << a["name"].get<std::string>() << ": "
        << a["detail"].get<std::string>() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reed-Muller local correction experiments"};
  app.require_subcommand(1);

  std::string config_path, preset, seed, json_path, csv_path, trials, threads, address, point;
  std::vector<std::string> sets;
  bool unsound = false, print_json = false;
  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--preset", preset, "preset name (T1, T2, T3, S1, or e.g. soundness-S1)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--json", json_path, "write the JSON report here");
  app.add_option("--csv", csv_path, "write the CSV dump here");
  app.add_option("--trials", trials, "number of trials");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--address", address, "composed address (decimal)");
  app.add_option("--point", point, "point as comma-separated integer codes");
  app.add_option("--set", sets, "configuration override key=value (repeatable)");
  app.add_flag("--unsound", unsound, "run despite failing theorem preconditions; marks the report");
  app.add_flag("--print-json", print_json, "print the JSON report to stdout");

  for (const auto& name : rlcc::experiment_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = rlcc::default_config();
    if (!config_path.empty()) cfg = rlcc::load_config(config_path, cfg);
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (!preset.empty()) rlcc::set_config_value(cfg, "preset", preset);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw rlcc::ConfigError("--set expects key=value, got '" + kv + "'");
      rlcc::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed.empty()) rlcc::set_config_value(cfg, "seed", seed);
    if (!trials.empty()) rlcc::set_config_value(cfg, "trials", trials);
    if (!threads.empty()) rlcc::set_config_value(cfg, "threads", threads);
    if (!address.empty()) cfg.address = address;
    if (!point.empty()) cfg.point = point;
    if (!json_path.empty()) cfg.json_path = json_path;
    if (!csv_path.empty()) cfg.csv_path = csv_path;
    if (unsound) cfg.unsound = true;

    const auto result = rlcc::run_experiment(cfg);
    rlcc::write_outputs(result, cfg);
    if (print_json) {
      std::cout << result.report.dump(2) << '\n';
    } else {
      print_summary(result, std::cout);
    }
    return result.pass ? 0 : 1;
  } catch (const rlcc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
