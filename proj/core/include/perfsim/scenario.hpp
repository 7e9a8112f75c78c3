#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "perfsim/classifier.hpp"
#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/interval.hpp"

namespace perfsim {

enum class ScenarioKind {
  kOscillation,
  kDensities,
  kOptimaBurden,
  kSmoothness,
  kEstimation,
  kCounterexample,
};

// A fully validated scenario: the reproducible unit of work the CLI runs.
// Strict schema: unknown keys are rejected at parse time.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kDensities;
  BaseDistribution base = BaseDistribution::symmetric_gaussian_mixture();
  CostFunction cost = CostFunction::linear(1.0, 1.0);
  std::vector<double> p_list;
  std::vector<double> sigma_list;
  std::vector<double> thetas;      // densities: deployment thresholds
  std::vector<double> epsilons;    // counterexample
  std::vector<double> alpha_list;  // estimation: cost steepness sweep
  Interval theta_range = kDefaultThetaRange;
  double theta_step = kDefaultThetaStep;
  int n = 100000;
  int rounds = 100;
  double theta0 = 0.5;
  double epsilon = 0.02;   // estimation accuracy target
  double delta = 0.02;     // smoothness finite-difference half width
  std::uint64_t seed = 0;

  std::string canonical_json() const;
  std::string hash() const;  // FNV-1a over the canonical form
};

// Parse and validate a config document; ConfigError carries the offending
// key path or the parser's position for malformed JSON.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& file);

// Run one scenario, writing CSV/JSON outputs under out_dir. Reruns with an
// identical config produce byte-identical files.
// Returns the list of files written (relative to out_dir).
std::vector<std::string> run_scenario(const ScenarioConfig& config,
                                      const std::filesystem::path& out_dir);

}  // namespace perfsim
