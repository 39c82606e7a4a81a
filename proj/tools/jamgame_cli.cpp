#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jamgame/runner/config.hpp"
#include "jamgame/runner/runner.hpp"

using namespace jamgame::runner;

int main(int argc, char** argv) {
  CLI::App app{"Jamming game solvers and network simulator"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<std::size_t> trials;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON config file (a result.json is accepted too)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--epsilon", epsilon, "FNE tolerance for the reactive solvers");
  app.add_option("--trials", trials, "Simulation rounds");
  app.add_option("--set", overrides, "Override a config entry, e.g. --set costs.d=0.5");
  app.add_flag("--quiet", quiet, "Do not print the result record");

  auto* solve = app.add_subcommand("solve", "Solve one game instance");
  solve->require_subcommand(1);
  std::string mode;
  solve->add_subcommand("proactive", "Proactive jammer saddle point")->callback([&] { mode = "proactive"; });
  solve->add_subcommand("reactive", "Reactive jammer FNE via PGA-CCP or GDA")->callback([&] { mode = "reactive"; });
  solve->add_subcommand("large-scale", "Large-network saddle point")->callback([&] { mode = "large_scale"; });
  app.add_subcommand("simulate", "Monte Carlo network simulation")->callback([&] { mode = "simulate"; });
  app.add_subcommand("sweep", "Cartesian sweep over config entries")->callback([&] { mode = "sweep"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    Json input = config_path.empty() ? Json::object() : load_config_file(config_path);
    if (!input.is_object()) throw ConfigError("--config", "top level must be an object");
    if (mode == "sweep") {
      input["mode"] = "sweep";
    } else {
      input["mode"] = mode;
      input.erase("sweep");
    }
    for (const auto& o : overrides) apply_override(input, o);
    if (seed) input["seed"] = *seed;
    if (epsilon) set_path(input, "solver.epsilon", *epsilon);
    if (trials) set_path(input, "simulate.trials", *trials);

    const ExperimentConfig config = parse_config(input);
    const RunOutcome outcome = run(config, out_dir);
    if (!quiet) std::cout << outcome.record.dump(2) << "\n";
    if (outcome.exit_code == kExitNotConverged) std::cerr << "warning: not converged (record written)\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const jamgame::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
