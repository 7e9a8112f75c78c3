#include "perfsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "perfsim/aggregate.hpp"
#include "perfsim/classifier.hpp"
#include "perfsim/dynamics.hpp"
#include "perfsim/errors.hpp"
#include "perfsim/estimation.hpp"
#include "perfsim/numerics.hpp"
#include "perfsim/risk.hpp"
#include "perfsim/version.hpp"

namespace perfsim {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + path + "/" + it.key() + "'");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + path + "/" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("'" + where + "' must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("'" + where + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t as_seed(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError("'" + where + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> as_number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, where));
  return out;
}

BaseDistribution parse_base(const json& b) {
  if (!b.is_object()) throw ConfigError("'base' must be an object");
  if (b.contains("preset")) {
    expect_keys(b, "base", {"preset"});
    std::string preset = as_string(require(b, "base", "preset"), "base/preset");
    if (preset == "symmetric_mixture") return BaseDistribution::symmetric_gaussian_mixture();
    if (preset == "uniform_unit") return BaseDistribution::uniform_unit();
    throw ConfigError("'base/preset' must be symmetric_mixture or uniform_unit");
  }
  expect_keys(b, "base", {"support", "components"});
  auto support = as_number_list(require(b, "base", "support"), "base/support");
  if (support.size() != 2) throw ConfigError("'base/support' must be [lo, hi]");
  const json& comps = require(b, "base", "components");
  if (!comps.is_array() || comps.empty()) {
    throw ConfigError("'base/components' must be a non-empty array");
  }
  std::vector<Component> components;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const json& c = comps[i];
    std::string path = "base/components[" + std::to_string(i) + "]";
    std::string kind = as_string(require(c, path, "kind"), path + "/kind");
    Component comp;
    comp.label = static_cast<int>(as_number(require(c, path, "label"), path + "/label"));
    comp.weight = as_number(require(c, path, "weight"), path + "/weight");
    if (kind == "gaussian") {
      expect_keys(c, path, {"kind", "label", "weight", "mean", "std"});
      comp.kind = ComponentKind::kGaussian;
      comp.a = as_number(require(c, path, "mean"), path + "/mean");
      comp.b = as_number(require(c, path, "std"), path + "/std");
    } else if (kind == "uniform") {
      expect_keys(c, path, {"kind", "label", "weight", "lo", "hi"});
      comp.kind = ComponentKind::kUniform;
      comp.a = as_number(require(c, path, "lo"), path + "/lo");
      comp.b = as_number(require(c, path, "hi"), path + "/hi");
    } else {
      throw ConfigError("'" + path + "/kind' must be gaussian or uniform");
    }
    components.push_back(comp);
  }
  try {
    return BaseDistribution(components, Interval{support[0], support[1]});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("'base': ") + e.what());
  }
}

CostFunction parse_cost(const json& c) {
  if (!c.is_object()) throw ConfigError("'cost' must be an object");
  std::string kind = as_string(require(c, "cost", "kind"), "cost/kind");
  double gamma = c.contains("gamma") ? as_number(c["gamma"], "cost/gamma") : 1.0;
  try {
    if (kind == "linear") {
      expect_keys(c, "cost", {"kind", "alpha", "gamma"});
      return CostFunction::linear(as_number(require(c, "cost", "alpha"), "cost/alpha"),
                                  gamma);
    }
    if (kind == "squared_difference") {
      expect_keys(c, "cost", {"kind", "gamma"});
      return CostFunction::squared_difference(gamma);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("'cost': ") + e.what());
  }
  throw ConfigError("'cost/kind' must be linear or squared_difference");
}

ScenarioKind parse_kind(const std::string& s) {
  if (s == "oscillation") return ScenarioKind::kOscillation;
  if (s == "densities") return ScenarioKind::kDensities;
  if (s == "optima_burden") return ScenarioKind::kOptimaBurden;
  if (s == "smoothness") return ScenarioKind::kSmoothness;
  if (s == "estimation") return ScenarioKind::kEstimation;
  if (s == "counterexample") return ScenarioKind::kCounterexample;
  throw ConfigError("'scenario' must be one of oscillation|densities|optima_burden|"
                    "smoothness|estimation|counterexample");
}

const char* kind_tag(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kOscillation:
      return "oscillation";
    case ScenarioKind::kDensities:
      return "densities";
    case ScenarioKind::kOptimaBurden:
      return "optima_burden";
    case ScenarioKind::kSmoothness:
      return "smoothness";
    case ScenarioKind::kEstimation:
      return "estimation";
    case ScenarioKind::kCounterexample:
      return "counterexample";
  }
  return "?";
}

void check_positive_int(int v, const char* what) {
  if (v < 1) throw ConfigError(std::string("'") + what + "' must be >= 1");
}

std::string trim_number(double v) { return num::format_double(v); }

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  expect_keys(root, "", {"scenario", "seed", "n", "rounds", "theta0", "base", "cost",
                         "grid", "p_list", "sigma_list", "thetas", "epsilon", "epsilons",
                         "alpha_list", "delta"});

  ScenarioConfig cfg;
  cfg.kind = parse_kind(as_string(require(root, "", "scenario"), "scenario"));
  cfg.seed = as_seed(require(root, "", "seed"), "seed");
  cfg.base = parse_base(require(root, "", "base"));
  cfg.cost = parse_cost(require(root, "", "cost"));
  if (root.contains("n")) cfg.n = static_cast<int>(as_number(root["n"], "n"));
  check_positive_int(cfg.n, "n");
  if (root.contains("rounds")) cfg.rounds = static_cast<int>(as_number(root["rounds"], "rounds"));
  if (root.contains("theta0")) cfg.theta0 = as_number(root["theta0"], "theta0");
  if (root.contains("epsilon")) cfg.epsilon = as_number(root["epsilon"], "epsilon");
  if (root.contains("delta")) cfg.delta = as_number(root["delta"], "delta");
  if (root.contains("grid")) {
    const json& g = root["grid"];
    expect_keys(g, "grid", {"min", "max", "step"});
    cfg.theta_range = {as_number(require(g, "grid", "min"), "grid/min"),
                       as_number(require(g, "grid", "max"), "grid/max")};
    cfg.theta_step = as_number(require(g, "grid", "step"), "grid/step");
    if (!(cfg.theta_range.lo < cfg.theta_range.hi) || !(cfg.theta_step > 0.0)) {
      throw ConfigError("'grid' must satisfy min < max and step > 0");
    }
  }
  if (root.contains("p_list")) cfg.p_list = as_number_list(root["p_list"], "p_list");
  if (root.contains("sigma_list")) cfg.sigma_list = as_number_list(root["sigma_list"], "sigma_list");
  if (root.contains("thetas")) cfg.thetas = as_number_list(root["thetas"], "thetas");
  if (root.contains("epsilons")) cfg.epsilons = as_number_list(root["epsilons"], "epsilons");
  if (root.contains("alpha_list")) cfg.alpha_list = as_number_list(root["alpha_list"], "alpha_list");

  for (double p : cfg.p_list) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("'p_list' entries must lie in [0, 1]");
  }
  for (double s : cfg.sigma_list) {
    if (!(s > 0.0)) throw ConfigError("'sigma_list' entries must be positive");
  }
  for (double t : cfg.thetas) {
    if (!cfg.theta_range.contains(t)) throw ConfigError("'thetas' entries must lie in the grid range");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("'epsilon' must be positive");
  if (!(cfg.delta > 0.0)) throw ConfigError("'delta' must be positive");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0)) throw ConfigError("'epsilons' entries must be positive");
  }
  for (double a : cfg.alpha_list) {
    if (!(a > 0.0)) throw ConfigError("'alpha_list' entries must be positive");
  }

  switch (cfg.kind) {
    case ScenarioKind::kOscillation:
      if (cfg.p_list.empty()) throw ConfigError("oscillation requires 'p_list'");
      if (cfg.rounds < 10) throw ConfigError("oscillation requires 'rounds' >= 10");
      if (!cfg.theta_range.contains(cfg.theta0)) {
        throw ConfigError("'theta0' must lie in the grid range");
      }
      break;
    case ScenarioKind::kDensities:
      if (cfg.thetas.empty()) throw ConfigError("densities requires 'thetas'");
      if (cfg.sigma_list.empty()) throw ConfigError("densities requires 'sigma_list'");
      break;
    case ScenarioKind::kOptimaBurden:
      if (cfg.p_list.empty() || cfg.sigma_list.empty()) {
        throw ConfigError("optima_burden requires 'p_list' and 'sigma_list'");
      }
      break;
    case ScenarioKind::kSmoothness:
      break;
    case ScenarioKind::kEstimation:
      if (!cfg.alpha_list.empty() && cfg.cost.kind() != CostKind::kLinear) {
        throw ConfigError("'alpha_list' applies to linear costs only");
      }
      break;
    case ScenarioKind::kCounterexample:
      if (cfg.epsilons.empty()) throw ConfigError("counterexample requires 'epsilons'");
      if (cfg.cost.kind() != CostKind::kSquaredDifference) {
        throw ConfigError("counterexample requires the squared_difference cost");
      }
      break;
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string ScenarioConfig::canonical_json() const {
  json root;
  root["scenario"] = kind_tag(kind);
  root["seed"] = seed;
  root["n"] = n;
  root["rounds"] = rounds;
  root["theta0"] = theta0;
  root["epsilon"] = epsilon;
  root["delta"] = delta;
  root["grid"] = {{"min", theta_range.lo}, {"max", theta_range.hi}, {"step", theta_step}};
  json comps = json::array();
  for (const auto& c : base.components()) {
    json jc;
    jc["label"] = c.label;
    jc["weight"] = c.weight;
    if (c.kind == ComponentKind::kGaussian) {
      jc["kind"] = "gaussian";
      jc["mean"] = c.a;
      jc["std"] = c.b;
    } else {
      jc["kind"] = "uniform";
      jc["lo"] = c.a;
      jc["hi"] = c.b;
    }
    comps.push_back(jc);
  }
  root["base"] = {{"support", {base.support().lo, base.support().hi}},
                  {"components", comps}};
  if (cost.kind() == CostKind::kLinear) {
    root["cost"] = {{"kind", "linear"}, {"alpha", cost.alpha()}, {"gamma", cost.gamma()}};
  } else {
    root["cost"] = {{"kind", "squared_difference"}, {"gamma", cost.gamma()}};
  }
  root["p_list"] = p_list;
  root["sigma_list"] = sigma_list;
  root["thetas"] = thetas;
  root["epsilons"] = epsilons;
  root["alpha_list"] = alpha_list;
  return root.dump();
}

std::string ScenarioConfig::hash() const {
  std::string s = canonical_json();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + (dir / name).string());
  return out;
}

void provenance_line(std::ofstream& out, const ScenarioConfig& cfg) {
  out << "# perfsim " << kVersion << " config " << cfg.hash() << " seed " << cfg.seed
      << "\n";
}

std::vector<std::string> run_oscillation(const ScenarioConfig& cfg,
                                         const std::filesystem::path& dir) {
  std::vector<std::string> files;
  auto grid = make_theta_grid(cfg.theta_range.lo, cfg.theta_range.hi, cfg.theta_step);
  RandomSource master(cfg.seed);
  std::uint64_t task = 0;
  // Empty sigma_list means perfectly informed strategic agents.
  std::vector<double> sigmas = cfg.sigma_list;
  bool standard_inner = sigmas.empty();
  if (standard_inner) sigmas.push_back(0.0);
  for (double sigma : sigmas) {
    ResponseModel inner = standard_inner
                              ? ResponseModel::standard(cfg.cost)
                              : ResponseModel::noisy(sigma, cfg.cost);
    for (double p : cfg.p_list) {
      ResponseModel model = ResponseModel::mixture(p, inner);
      RandomSource rng = master.split(task++);
      Trajectory t = rrm_trajectory(model, cfg.base, cfg.theta0, cfg.rounds, grid, cfg.n, rng);
      std::string name = "trajectory_p" + trim_number(p);
      if (!standard_inner) name += "_sigma" + trim_number(sigma);
      name += ".csv";
      auto out = open_out(dir, name);
      provenance_line(out, cfg);
      t.write_csv(out);
      files.push_back(name);
    }
  }
  return files;
}

std::vector<std::string> run_densities(const ScenarioConfig& cfg,
                                       const std::filesystem::path& dir) {
  std::vector<std::string> files;
  RandomSource master(cfg.seed);
  std::uint64_t task = 0;
  struct Entry {
    ResponseModel model;
    std::string tag;
  };
  std::vector<Entry> entries;
  entries.push_back({ResponseModel::standard(cfg.cost), "standard"});
  for (double s : cfg.sigma_list) {
    entries.push_back({ResponseModel::noisy(s, cfg.cost), "noisy_sigma" + trim_number(s)});
  }
  for (const Entry& e : entries) {
    Interval xp = e.model.extended_support(cfg.base.support());
    auto grid = make_theta_grid(xp.lo, xp.hi, xp.width() / 2200.0);
    for (double theta : cfg.thetas) {
      RandomSource rng = master.split(task++);
      DensityProfile prof = density_profile(e.model, cfg.base, theta, grid, cfg.n, rng);
      std::string name = "density_" + e.tag + "_theta" + trim_number(theta) + ".csv";
      auto out = open_out(dir, name);
      provenance_line(out, cfg);
      prof.write_csv(out);
      files.push_back(name);
    }
  }
  return files;
}

std::vector<std::string> run_optima_burden(const ScenarioConfig& cfg,
                                           const std::filesystem::path& dir) {
  auto grid = make_theta_grid(cfg.theta_range.lo, cfg.theta_range.hi, cfg.theta_step);
  RandomSource master(cfg.seed);
  std::uint64_t task = 0;
  auto out = open_out(dir, "optima_burden.csv");
  provenance_line(out, cfg);
  out << "model,p,sigma,theta_po,risk,std_error,social_burden\n";
  auto emit = [&](const std::string& tag, double p, double sigma,
                  const ResponseModel& model) {
    RandomSource rng = master.split(task++);
    auto [theta_po, risk] = performative_optimum(model, cfg.base, grid, cfg.n, rng);
    out << tag << "," << trim_number(p) << "," << trim_number(sigma) << ","
        << trim_number(theta_po) << "," << trim_number(risk.value) << ","
        << trim_number(risk.std_error) << ","
        << trim_number(social_burden(cfg.base, cfg.cost, theta_po)) << "\n";
  };
  for (double sigma : cfg.sigma_list) {
    ResponseModel inner = ResponseModel::noisy(sigma, cfg.cost);
    for (double p : cfg.p_list) {
      emit("noisy_mixture", p, sigma, ResponseModel::mixture(p, inner));
    }
  }
  emit("standard", 0.0, 0.0, ResponseModel::standard(cfg.cost));
  emit("non_strategic", 1.0, 0.0, ResponseModel::non_strategic(cfg.cost));
  return {"optima_burden.csv"};
}

std::vector<std::string> run_smoothness(const ScenarioConfig& cfg,
                                        const std::filesystem::path& dir) {
  auto grid = make_theta_grid(cfg.theta_range.lo, cfg.theta_range.hi, cfg.theta_step);
  RandomSource master(cfg.seed);
  std::uint64_t task = 0;
  auto out = open_out(dir, "smoothness.csv");
  provenance_line(out, cfg);
  out << "model,theta,theta_prime,derivative,jump,noise_floor,flagged\n";
  struct Entry {
    ResponseModel model;
    std::string tag;
  };
  std::vector<Entry> entries;
  entries.push_back({ResponseModel::non_strategic(cfg.cost), "non_strategic"});
  for (double s : cfg.sigma_list) {
    entries.push_back({ResponseModel::noisy(s, cfg.cost), "noisy_sigma" + trim_number(s)});
  }
  for (double p : cfg.p_list) {
    entries.push_back({ResponseModel::mixture(p, ResponseModel::standard(cfg.cost)),
                       "sm_mixture_p" + trim_number(p)});
  }
  for (const Entry& e : entries) {
    RandomSource rng = master.split(task++);
    SmoothnessReport rep =
        smoothness_diagnostic(e.model, cfg.base, grid, cfg.delta, cfg.n, rng);
    for (const auto& r : rep.entries) {
      out << e.tag << "," << trim_number(r.theta) << "," << trim_number(r.theta_prime)
          << "," << trim_number(r.derivative) << "," << trim_number(r.jump) << ","
          << trim_number(r.noise_floor) << "," << (r.flagged ? 1 : 0) << "\n";
    }
  }
  return {"smoothness.csv"};
}

std::vector<std::string> run_estimation(const ScenarioConfig& cfg,
                                        const std::filesystem::path& dir) {
  std::vector<std::string> files;
  RandomSource master(cfg.seed);
  std::uint64_t task = 0;
  std::vector<double> alphas = cfg.alpha_list;
  bool single = alphas.empty();
  if (single) alphas.push_back(cfg.cost.alpha());
  for (double alpha : alphas) {
    CostFunction cost = cfg.cost.kind() == CostKind::kLinear
                            ? CostFunction::linear(alpha, cfg.cost.gamma())
                            : cfg.cost;
    ResponseModel hidden = ResponseModel::standard(cost);
    ResponseOracle oracle(hidden, cfg.base.support(), master.split(task++));
    RandomSource rng = master.split(task++);
    Interval theta0 = construct_theta0(cfg.base, cost, cfg.theta_range);
    EstimationResult res =
        estimate_optimum_via_oracle(oracle, cfg.base, cost, cfg.epsilon, theta0, rng);
    // True risk curve of the hidden standard model, by CDF arithmetic.
    auto true_pr = [&](double theta) {
      double lo = gaming_lower_bound(cost, cfg.base.support(), theta);
      return (cfg.base.label_mass(0) - cfg.base.cdf(lo, 0)) + cfg.base.cdf(lo, 1);
    };
    int net_points = static_cast<int>(std::floor(theta0.width() / cfg.epsilon + 1e-12)) + 1;
    double best = true_pr(theta0.lo);
    for (int k = 1; k < net_points; ++k) {
      best = std::min(best, true_pr(theta0.lo + k * cfg.epsilon));
    }
    json rep;
    rep["epsilon"] = res.epsilon;
    rep["zeta"] = res.zeta;
    rep["calls"] = res.calls;
    rep["theta_hat"] = res.theta_hat;
    rep["pr_hat"] = res.pr_hat;
    rep["pr_true_bound"] = best + cfg.epsilon;
    std::string name = single ? "estimation.json" : "estimation_alpha" + trim_number(alpha) + ".json";
    auto out = open_out(dir, name);
    out << rep.dump(2) << "\n";
    files.push_back(name);
  }
  return files;
}

std::vector<std::string> run_counterexample(const ScenarioConfig& cfg,
                                            const std::filesystem::path& dir) {
  RandomSource master(cfg.seed);
  RandomSource rng = master.split(0);
  auto points = wasserstein_counterexample(cfg.epsilons, cfg.n, rng);
  auto out = open_out(dir, "counterexample.csv");
  provenance_line(out, cfg);
  out << "epsilon,w1,ratio\n";
  for (const auto& p : points) {
    out << trim_number(p.epsilon) << "," << trim_number(p.w1) << ","
        << trim_number(p.ratio) << "\n";
  }
  return {"counterexample.csv"};
}

}  // namespace

std::vector<std::string> run_scenario(const ScenarioConfig& config,
                                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  switch (config.kind) {
    case ScenarioKind::kOscillation:
      return run_oscillation(config, out_dir);
    case ScenarioKind::kDensities:
      return run_densities(config, out_dir);
    case ScenarioKind::kOptimaBurden:
      return run_optima_burden(config, out_dir);
    case ScenarioKind::kSmoothness:
      return run_smoothness(config, out_dir);
    case ScenarioKind::kEstimation:
      return run_estimation(config, out_dir);
    case ScenarioKind::kCounterexample:
      return run_counterexample(config, out_dir);
  }
  throw std::logic_error("run_scenario: unreachable");
}

}  // namespace perfsim
