// perfsim: reproducible scenario runner for the strategic-classification
// simulation library. Exit codes: 0 ok, 1 config error, 2 runtime error.
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "perfsim/errors.hpp"
#include "perfsim/scenario.hpp"
#include "perfsim/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"perfsim: strategic-classification scenario runner"};
  app.set_version_flag("--version", std::string(perfsim::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  int samples_override = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario and emit its data files");
  run->add_option("--config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed_override, "override the config seed")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_option("--samples", samples_override, "override the population size n");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("--config", config_path, "scenario config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    perfsim::ScenarioConfig cfg = perfsim::load_config(config_path);
    if (validate->parsed()) {
      std::cout << "ok: " << config_path << " (hash " << cfg.hash() << ")\n";
      return 0;
    }
    if (have_seed) cfg.seed = seed_override;
    if (samples_override > 0) cfg.n = samples_override;
    try {
      auto files = perfsim::run_scenario(cfg, out_dir);
      for (const auto& f : files) std::cout << f << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return 2;
    }
  } catch (const perfsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}
