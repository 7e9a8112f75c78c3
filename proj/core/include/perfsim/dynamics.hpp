#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "perfsim/risk.hpp"

namespace perfsim {

// An ordered sequence of thresholds produced by a retraining dynamic.
struct Trajectory {
  enum class Verdict { kConverged, kOscillating, kBudgetExhausted };

  std::vector<double> thetas;  // thetas[0] is the start
  std::vector<double> dpr;     // DPR(theta_k, theta_k) per round, same length
  Verdict verdict = Verdict::kBudgetExhausted;
  double grid_step = 0.0;

  // Converged: |theta_{k+1} - theta_k| <= grid_step for 3 consecutive rounds.
  double limit = 0.0;
  int round = 0;

  // Oscillating: a sustained cycle between a low and a high envelope point
  // (endpoint spread within 2 grid steps, >= 5 cycles).
  double low = 0.0;
  double high = 0.0;
  int period = 0;

  // CSV columns round, theta, dpr_at_theta, verdict.
  void write_csv(std::ostream& os) const;
};

// One repeated-risk-minimization update: a fresh population responds to
// theta, the next threshold is the grid argmin of the decoupled risk.
// The non-strategic stratum's risk is evaluated in closed form against the
// base; only the strategic stratum is simulated (same estimand, smaller
// variance). Exact ties break toward the largest grid point so that a
// threshold that is already optimal stays fixed.
double rrm_step(const ResponseModel& model, const BaseDistribution& base, double theta,
                std::span<const double> theta_grid, int n, RandomSource& rng);

Trajectory rrm_trajectory(const ResponseModel& model, const BaseDistribution& base,
                          double theta0, int rounds, std::span<const double> theta_grid,
                          int n, RandomSource& rng);

// Repeated projected gradient descent on the decoupled risk; the gradient is
// a central finite difference at (theta, theta). Refuses models whose
// aggregate is not smooth (the objective is not differentiable there).
Trajectory rgd_trajectory(const ResponseModel& model, const BaseDistribution& base,
                          double theta0, double step_size, int rounds, double fd_delta,
                          int n, RandomSource& rng, double conv_tol = 5e-3);

struct StabilityPoint {
  double theta = 0.0;
  bool stable = false;
  double margin = 0.0;  // min window DPR minus DPR(theta, theta)
};

// theta is flagged epsilon-locally-stable when no threshold within the
// neighborhood improves DPR(theta, .) by more than 3 standard errors.
std::vector<StabilityPoint> local_stability_scan(const ResponseModel& model,
                                                 const BaseDistribution& base,
                                                 std::span<const double> theta_grid,
                                                 double neighborhood, int n,
                                                 RandomSource& rng);

// Grid argmin of the performative risk under common random numbers
// (one frozen population replayed against every theta).
std::pair<double, RiskEstimate> performative_optimum(const ResponseModel& model,
                                                     const BaseDistribution& base,
                                                     std::span<const double> theta_grid,
                                                     int n, RandomSource& rng);

}  // namespace perfsim
