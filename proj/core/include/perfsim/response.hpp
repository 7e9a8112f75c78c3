#pragma once

#include <functional>
#include <span>
#include <string>

#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/interval.hpp"
#include "perfsim/random.hpp"

namespace perfsim {

enum class ResponseKind { kStandard, kNoisy, kNonStrategic, kMixture };

// An agent-response specification realizing R_t(x, theta):
//   standard       best response with perfect information,
//   noisy(sigma)   best response against a perceived threshold theta + eta,
//                  eta ~ N(0, sigma^2) fixed per agent,
//   non_strategic  identity response,
//   mixture(p, m)  a p fraction is non-strategic, the rest follows m
//                  (m must itself be a non-mixture kind).
class ResponseModel {
 public:
  static ResponseModel standard(CostFunction cost);
  static ResponseModel noisy(double sigma, CostFunction cost);
  static ResponseModel non_strategic(CostFunction cost);
  static ResponseModel mixture(double p, const ResponseModel& inner);

  ResponseKind kind() const { return kind_; }
  // The kind governing strategic agents (the inner kind for mixtures).
  ResponseKind effective_kind() const { return effective_kind_; }
  double sigma() const { return sigma_; }
  double mixture_p() const { return p_; }
  const CostFunction& cost() const { return cost_; }

  // Fraction of the population that never moves: p for mixtures, 1 for
  // non_strategic, 0 otherwise.
  double non_strategic_mass() const;
  // True when the induced aggregate has no boundary atom for any theta
  // (no standard component with positive weight).
  bool aggregate_smooth() const;
  // X' = X padded by 6 sigma; noisy manipulation targets are clamped to it.
  Interval extended_support(Interval support) const;

  std::string describe() const;

 private:
  ResponseModel(ResponseKind kind, ResponseKind effective, double sigma, double p,
                CostFunction cost)
      : kind_(kind), effective_kind_(effective), sigma_(sigma), p_(p), cost_(cost) {}
  ResponseKind kind_;
  ResponseKind effective_kind_;
  double sigma_;
  double p_;
  CostFunction cost_;
};

// Per-agent traits drawn once per scenario run: the perception noise and
// whether the mixture left the agent strategic.
struct AgentTraits {
  double eta = 0.0;
  bool strategic = true;
};

// A population draw: true features, true label, and the agent's traits.
// Responses never read the label; it rides along for risk evaluation only.
struct AgentDraw {
  double x = 0.0;
  int y = 0;
  double eta = 0.0;
  bool strategic = true;
  AgentTraits traits() const { return {eta, strategic}; }
};

AgentTraits draw_traits(const ResponseModel& model, RandomSource& rng);
AgentDraw draw_agent(const ResponseModel& model, const BaseDistribution& base,
                     RandomSource& rng);

// R_t(x, theta). Label-independent by construction: the inputs are exactly
// (x, traits, theta). `target_clamp` is the compact X' that perceived
// manipulation targets are clamped to (model.extended_support(X)).
double respond(const ResponseModel& model, double x, const AgentTraits& traits,
               double theta, Interval target_clamp);

struct ExpenditureReport {
  bool ok = true;
  double max_expenditure = 0.0;
  double witness_x = 0.0;
  double witness_theta = 0.0;
  double witness_eta = 0.0;
};

// Samples (x, theta, traits) triples and asserts c(x, R_t(x, theta)) <= gamma
// (Property-3 style check). Returns the worst observed expenditure.
ExpenditureReport check_expenditure_constraint(const ResponseModel& model,
                                               const BaseDistribution& base,
                                               Interval theta_range, int trials,
                                               RandomSource& rng);

// Same check against an arbitrary response function (for test doubles).
ExpenditureReport check_expenditure_constraint(
    const std::function<double(double x, double theta)>& response_fn,
    const CostFunction& cost, const BaseDistribution& base, Interval theta_range,
    int trials, RandomSource& rng);

struct MonotonicityReport {
  bool ok = true;
  double witness_x = 0.0;
  double witness_eta = 0.0;
  double theta_accept = 0.0;  // a threshold where the witness was accepted
  double theta_reject = 0.0;  // a smaller threshold where it was rejected
};

// Per fixed agent (x, eta, strategic replayed across the grid), acceptance
// must be non-increasing in theta (Property 1(b)).
MonotonicityReport check_expenditure_monotonicity(const ResponseModel& model,
                                                  const BaseDistribution& base,
                                                  std::span<const double> theta_grid,
                                                  int trials, RandomSource& rng);

}  // namespace perfsim
