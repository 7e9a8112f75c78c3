#include "perfsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "perfsim/errors.hpp"
#include "perfsim/numerics.hpp"

namespace perfsim {

namespace {

// The dynamics ops evaluate risks stratified by strategic behavior: the
// non-strategic stratum contributes the closed-form base risk, the strategic
// stratum a Monte Carlo sample of round((1-q) n) agents.
struct StratifiedSample {
  double q = 0.0;           // non-strategic mass
  long n_strategic = 0;
  std::vector<double> xs;   // strategic true features
  std::vector<int> ys;
  std::vector<double> etas;
};

StratifiedSample draw_strategic(const ResponseModel& model, const BaseDistribution& base,
                                int n, RandomSource& rng) {
  StratifiedSample s;
  s.q = model.non_strategic_mass();
  s.n_strategic = std::llround((1.0 - s.q) * n);
  bool noisy = model.effective_kind() == ResponseKind::kNoisy;
  s.xs.reserve(static_cast<std::size_t>(s.n_strategic));
  s.ys.reserve(static_cast<std::size_t>(s.n_strategic));
  if (noisy) s.etas.reserve(static_cast<std::size_t>(s.n_strategic));
  for (long i = 0; i < s.n_strategic; ++i) {
    auto [x, y] = base.sample_one(rng);
    s.xs.push_back(x);
    s.ys.push_back(y);
    if (noisy) s.etas.push_back(rng.normal(0.0, model.sigma()));
  }
  return s;
}

// Respond the strategic stratum to a deployment threshold.
std::vector<double> respond_all(const ResponseModel& model, const StratifiedSample& s,
                                double theta, Interval clamp) {
  std::vector<double> xp(s.xs.size());
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    AgentTraits t{s.etas.empty() ? 0.0 : s.etas[i], true};
    xp[i] = respond(model, s.xs[i], t, theta, clamp);
  }
  return xp;
}

struct RoundEvaluation {
  double next_theta = 0.0;
  double dpr_self = 0.0;
};

// One retraining round: sample, sweep the grid, pick the argmin.
// Exact ties break toward the largest grid point (a currently optimal
// threshold stays fixed); see rrm_step docs.
RoundEvaluation rrm_round(const ResponseModel& model, const BaseDistribution& base,
                          double theta, std::span<const double> grid,
                          std::span<const double> base_vals, int n, RandomSource& rng) {
  StratifiedSample s = draw_strategic(model, base, n, rng);
  Interval clamp = model.extended_support(base.support());
  RoundEvaluation out;
  if (s.n_strategic == 0) {
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i == 0 || base_vals[i] <= best) {
        best = base_vals[i];
        best_i = i;
      }
    }
    out.next_theta = grid[best_i];
    out.dpr_self = base_risk(base, theta);
    return out;
  }
  std::vector<double> xp = respond_all(model, s, theta, clamp);
  EmpiricalRisk emp(xp, s.ys);
  double best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = s.q * base_vals[i] + (1.0 - s.q) * emp(grid[i]);
    if (i == 0 || v <= best) {
      best = v;
      best_i = i;
    }
  }
  out.next_theta = grid[best_i];
  out.dpr_self = s.q * base_risk(base, theta) + (1.0 - s.q) * emp(theta);
  return out;
}

std::vector<double> base_risk_on_grid(const BaseDistribution& base,
                                      std::span<const double> grid) {
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = base_risk(base, grid[i]);
  return vals;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Sawtooth/cycle detection: a crash is a drop of more than 4 grid steps.
// Oscillating needs >= 5 crashes with each envelope endpoint consistent
// within 2 grid steps.
bool classify_oscillation(Trajectory& t) {
  const double step = t.grid_step;
  std::vector<double> highs;
  std::vector<double> lows;
  std::vector<int> crash_rounds;
  for (std::size_t k = 0; k + 1 < t.thetas.size(); ++k) {
    if (t.thetas[k + 1] < t.thetas[k] - 4.0 * step) {
      highs.push_back(t.thetas[k]);
      lows.push_back(t.thetas[k + 1]);
      crash_rounds.push_back(static_cast<int>(k));
    }
  }
  if (highs.size() < 5) return false;
  double h = median(highs);
  double l = median(lows);
  for (double v : highs) {
    if (std::abs(v - h) > 2.0 * step) return false;
  }
  for (double v : lows) {
    if (std::abs(v - l) > 2.0 * step) return false;
  }
  t.verdict = Trajectory::Verdict::kOscillating;
  t.low = l;
  t.high = h;
  t.period = static_cast<int>(std::llround(
      static_cast<double>(crash_rounds.back() - crash_rounds.front()) /
      static_cast<double>(crash_rounds.size() - 1)));
  return true;
}

void classify(Trajectory& t) {
  // Convergence first: three consecutive moves within one grid step.
  int run = 0;
  for (std::size_t k = 0; k + 1 < t.thetas.size(); ++k) {
    run = (std::abs(t.thetas[k + 1] - t.thetas[k]) <= t.grid_step) ? run + 1 : 0;
    if (run >= 3) {
      t.verdict = Trajectory::Verdict::kConverged;
      t.limit = t.thetas[k + 1];
      t.round = static_cast<int>(k + 1);
      return;
    }
  }
  if (classify_oscillation(t)) return;
  t.verdict = Trajectory::Verdict::kBudgetExhausted;
}

const char* verdict_tag(Trajectory::Verdict v) {
  switch (v) {
    case Trajectory::Verdict::kConverged:
      return "converged";
    case Trajectory::Verdict::kOscillating:
      return "oscillating";
    case Trajectory::Verdict::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "?";
}

}  // namespace

void Trajectory::write_csv(std::ostream& os) const {
  os << "round,theta,dpr_at_theta,verdict\n";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    os << k << "," << num::format_double(thetas[k]) << ","
       << num::format_double(k < dpr.size() ? dpr[k] : 0.0) << "," << verdict_tag(verdict)
       << "\n";
  }
}

double rrm_step(const ResponseModel& model, const BaseDistribution& base, double theta,
                std::span<const double> theta_grid, int n, RandomSource& rng) {
  if (theta_grid.empty()) throw std::invalid_argument("rrm_step: empty grid");
  std::vector<double> base_vals = base_risk_on_grid(base, theta_grid);
  return rrm_round(model, base, theta, theta_grid, base_vals, n, rng).next_theta;
}

Trajectory rrm_trajectory(const ResponseModel& model, const BaseDistribution& base,
                          double theta0, int rounds, std::span<const double> theta_grid,
                          int n, RandomSource& rng) {
  if (rounds < 10) throw std::invalid_argument("rrm_trajectory: rounds must be >= 10");
  if (theta_grid.size() < 2) throw std::invalid_argument("rrm_trajectory: grid too small");
  std::vector<double> base_vals = base_risk_on_grid(base, theta_grid);
  Trajectory t;
  t.grid_step = theta_grid[1] - theta_grid[0];
  t.thetas.push_back(theta0);
  double theta = theta0;
  for (int k = 0; k < rounds; ++k) {
    RandomSource round_rng = rng.split(static_cast<std::uint64_t>(k));
    RoundEvaluation ev = rrm_round(model, base, theta, theta_grid, base_vals, n, round_rng);
    t.dpr.push_back(ev.dpr_self);
    theta = ev.next_theta;
    t.thetas.push_back(theta);
    // Close out early once converged (three consecutive sub-step moves).
    std::size_t m = t.thetas.size();
    if (m >= 4 && std::abs(t.thetas[m - 1] - t.thetas[m - 2]) <= t.grid_step &&
        std::abs(t.thetas[m - 2] - t.thetas[m - 3]) <= t.grid_step &&
        std::abs(t.thetas[m - 3] - t.thetas[m - 4]) <= t.grid_step) {
      break;
    }
  }
  {
    RandomSource final_rng = rng.split(static_cast<std::uint64_t>(t.thetas.size()) + 1000003);
    StratifiedSample s = draw_strategic(model, base, n, final_rng);
    if (s.n_strategic == 0) {
      t.dpr.push_back(base_risk(base, theta));
    } else {
      std::vector<double> xp =
          respond_all(model, s, theta, model.extended_support(base.support()));
      EmpiricalRisk emp(xp, s.ys);
      t.dpr.push_back(s.q * base_risk(base, theta) + (1.0 - s.q) * emp(theta));
    }
  }
  classify(t);
  return t;
}

Trajectory rgd_trajectory(const ResponseModel& model, const BaseDistribution& base,
                          double theta0, double step_size, int rounds, double fd_delta,
                          int n, RandomSource& rng, double conv_tol) {
  if (!model.aggregate_smooth()) {
    throw UnsupportedConfiguration(
        "rgd_trajectory: the decoupled risk is not differentiable for models with a "
        "standard component; repeated gradient descent is undefined");
  }
  if (!(fd_delta > 0.0) || !(step_size > 0.0)) {
    throw std::invalid_argument("rgd_trajectory: step_size and fd_delta must be positive");
  }
  Interval clamp = model.extended_support(base.support());
  Interval range = kDefaultThetaRange;
  Trajectory t;
  t.grid_step = conv_tol;
  t.thetas.push_back(theta0);
  double theta = theta0;
  for (int k = 0; k < rounds; ++k) {
    RandomSource round_rng = rng.split(static_cast<std::uint64_t>(k));
    StratifiedSample s = draw_strategic(model, base, n, round_rng);
    double grad =
        s.q * (base_risk(base, theta + fd_delta) - base_risk(base, theta - fd_delta)) /
        (2.0 * fd_delta);
    double self = s.q * base_risk(base, theta);
    if (s.n_strategic > 0) {
      std::vector<double> xp = respond_all(model, s, theta, clamp);
      EmpiricalRisk emp(xp, s.ys);
      grad += (1.0 - s.q) * (emp(theta + fd_delta) - emp(theta - fd_delta)) /
              (2.0 * fd_delta);
      self += (1.0 - s.q) * emp(theta);
    }
    t.dpr.push_back(self);
    theta = range.clamp(theta - step_size * grad);
    t.thetas.push_back(theta);
    std::size_t m = t.thetas.size();
    if (m >= 4 && std::abs(t.thetas[m - 1] - t.thetas[m - 2]) <= conv_tol &&
        std::abs(t.thetas[m - 2] - t.thetas[m - 3]) <= conv_tol &&
        std::abs(t.thetas[m - 3] - t.thetas[m - 4]) <= conv_tol) {
      break;
    }
  }
  t.dpr.push_back(t.dpr.empty() ? 0.0 : t.dpr.back());
  classify(t);
  return t;
}

std::vector<StabilityPoint> local_stability_scan(const ResponseModel& model,
                                                 const BaseDistribution& base,
                                                 std::span<const double> theta_grid,
                                                 double neighborhood, int n,
                                                 RandomSource& rng) {
  if (theta_grid.size() < 2) throw std::invalid_argument("local_stability_scan: grid");
  double step = theta_grid[1] - theta_grid[0];
  if (!(neighborhood >= 2.0 * step)) {
    throw std::invalid_argument("local_stability_scan: neighborhood must span >= 2 steps");
  }
  Interval clamp = model.extended_support(base.support());
  std::vector<StabilityPoint> out;
  out.reserve(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    double theta = theta_grid[i];
    RandomSource local = rng.split(static_cast<std::uint64_t>(i));
    StratifiedSample s = draw_strategic(model, base, n, local);
    double self = s.q * base_risk(base, theta);
    double se = 0.0;
    double min_window;
    if (s.n_strategic > 0) {
      std::vector<double> xp = respond_all(model, s, theta, clamp);
      EmpiricalRisk emp(xp, s.ys);
      double vs = emp(theta);
      self += (1.0 - s.q) * vs;
      se = (1.0 - s.q) * std::sqrt(vs * (1.0 - vs) / static_cast<double>(s.n_strategic));
      min_window = self;
      for (std::size_t j = 0; j < theta_grid.size(); ++j) {
        if (std::abs(theta_grid[j] - theta) > neighborhood + 1e-12) continue;
        double v = s.q * base_risk(base, theta_grid[j]) + (1.0 - s.q) * emp(theta_grid[j]);
        min_window = std::min(min_window, v);
      }
    } else {
      min_window = self;
      for (std::size_t j = 0; j < theta_grid.size(); ++j) {
        if (std::abs(theta_grid[j] - theta) > neighborhood + 1e-12) continue;
        min_window = std::min(min_window, base_risk(base, theta_grid[j]));
      }
    }
    StabilityPoint p;
    p.theta = theta;
    p.margin = min_window - self;
    p.stable = self <= min_window + 3.0 * se;
    out.push_back(p);
  }
  return out;
}

std::pair<double, RiskEstimate> performative_optimum(const ResponseModel& model,
                                                     const BaseDistribution& base,
                                                     std::span<const double> theta_grid,
                                                     int n, RandomSource& rng) {
  if (theta_grid.empty()) throw std::invalid_argument("performative_optimum: empty grid");
  StratifiedSample s = draw_strategic(model, base, n, rng);
  Interval clamp = model.extended_support(base.support());
  double best = 0.0;
  double best_vs = 0.0;
  std::size_t best_i = 0;
  bool first = true;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    double theta = theta_grid[i];
    double vs = 0.0;
    if (s.n_strategic > 0) {
      long bad = 0;
      for (std::size_t a = 0; a < s.xs.size(); ++a) {
        AgentTraits tr{s.etas.empty() ? 0.0 : s.etas[a], true};
        double xp = respond(model, s.xs[a], tr, theta, clamp);
        bad += (s.ys[a] == 1) != (xp >= theta) ? 1 : 0;
      }
      vs = static_cast<double>(bad) / static_cast<double>(s.n_strategic);
    }
    double v = s.q * base_risk(base, theta) + (1.0 - s.q) * vs;
    // Ties break toward the smallest theta.
    if (first || v < best) {
      best = v;
      best_vs = vs;
      best_i = i;
      first = false;
    }
  }
  RiskEstimate e;
  e.value = best;
  e.n = std::max(s.n_strategic, 1L);
  e.std_error = s.n_strategic > 0
                    ? (1.0 - s.q) * std::sqrt(best_vs * (1.0 - best_vs) /
                                              static_cast<double>(s.n_strategic))
                    : 0.0;
  e.method = RiskMethod::kMonteCarlo;
  return {theta_grid[best_i], e};
}

}  // namespace perfsim
