// Batch front-end: loads a scenario configuration, dispatches to the library
// and emits phase / spectrum / curvature tables.
//
//   phasebundle <task> --config <file> [--out <path>] [--steps k]
//               [--metaplectic on|off] [--seed s]
//   phasebundle --show-defaults

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "phasebundle/scenario.hpp"

namespace {

int run(const std::string& task, const std::string& config_path, const std::string& out_path,
        int steps, const std::string& metaplectic, long seed) {
  using phasebundle::json;
  json config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file '" << config_path << "'\n";
      return 2;
    }
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    return 2;
  }

  config["task"] = task;
  if (steps > 0) config["steps"] = steps;
  if (!metaplectic.empty()) {
    if (metaplectic != "on" && metaplectic != "off") {
      std::cerr << "error: --metaplectic expects on|off\n";
      return 2;
    }
    config["metaplectic"] = (metaplectic == "on");
  }
  if (seed >= 0) config["seed"] = static_cast<unsigned>(seed);
  if (!out_path.empty()) config["output"]["path"] = out_path;

  try {
    phasebundle::ScenarioOutcome outcome = phasebundle::run_scenario(config);
    if (outcome.path.empty()) {
      std::cout << outcome.artifact;
    } else {
      std::ofstream out(outcome.path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write output file '" << outcome.path << "'\n";
        return 2;
      }
      out << outcome.artifact;
    }
    return 0;
  } catch (const phasebundle::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const phasebundle::AdiabaticityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const phasebundle::Error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric quantisation phases for families of linear phase spaces"};
  app.require_subcommand(0, 1);

  bool show_defaults = false;
  app.add_flag("--show-defaults", show_defaults, "print the numeric defaults table and exit");

  std::string config_path, out_path, metaplectic;
  int steps = -1;
  long seed = -1;

  const std::vector<std::string> tasks = {"check",    "holonomy", "curvature",
                                          "spectrum", "evolve",   "phases"};
  std::string selected;
  for (const auto& task : tasks) {
    CLI::App* sub = app.add_subcommand(task);
    sub->add_option("--config", config_path, "scenario configuration file (JSON)")
        ->required();
    sub->add_option("--out", out_path, "output artifact path (overrides config)");
    sub->add_option("--steps", steps, "transport/holonomy step count");
    sub->add_option("--metaplectic", metaplectic, "half-form correction: on|off");
    sub->add_option("--seed", seed, "random seed for generated structures");
    sub->callback([&selected, task]() { selected = task; });
  }

  CLI11_PARSE(app, argc, argv);

  if (show_defaults) {
    std::cout << phasebundle::default_settings().dump(2) << "\n";
    return 0;
  }
  if (selected.empty()) {
    std::cerr << app.help();
    return 2;
  }
  return run(selected, config_path, out_path, steps, metaplectic, seed);
}
