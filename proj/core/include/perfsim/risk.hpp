#pragma once

#include <span>
#include <vector>

#include "perfsim/classifier.hpp"
#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/response.hpp"

namespace perfsim {

enum class RiskMethod { kMonteCarlo, kClosedForm };

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n = 0;
  RiskMethod method = RiskMethod::kMonteCarlo;
};

// Misclassification of f_{theta'} on a frozen sample, evaluable for many
// theta' against the same draws (common random numbers).
class EmpiricalRisk {
 public:
  EmpiricalRisk(std::span<const double> x_prime, std::span<const int> labels);
  // Fraction with y != 1{x' >= theta_eval}.
  double operator()(double theta_eval) const;
  long misclassified(double theta_eval) const;
  // Number of sample points with x' in [lo, hi).
  long points_in(double lo, double hi) const;
  long size() const { return static_cast<long>(xs_.size()); }

 private:
  std::vector<double> xs_;        // sorted
  std::vector<long> pos_prefix_;  // positives among xs_[0..i)
};

// DPR_M(theta, theta') by Monte Carlo on one fresh sample of D(theta).
RiskEstimate decoupled_pr(const ResponseModel& model, const BaseDistribution& base,
                          double theta, double theta_eval, int n, RandomSource& rng);

// One shared sample across the whole theta_eval sweep.
std::vector<RiskEstimate> decoupled_pr_sweep(const ResponseModel& model,
                                             const BaseDistribution& base, double theta,
                                             std::span<const double> theta_evals, int n,
                                             RandomSource& rng);

// PR(theta) = DPR(theta, theta).
RiskEstimate performative_risk(const ResponseModel& model, const BaseDistribution& base,
                               double theta, int n, RandomSource& rng);

// Risk of f_theta on the base population, in closed form from the CDFs.
double base_risk(const BaseDistribution& base, double theta);

// Closed-form performative risk of the noisy-response population for the
// unit linear cost (alpha = 1, gamma = 1): tail terms plus the gap integral
//   int_0^1 (p1(theta-1+t) - p0(theta-1+t)) P[eta not in [0, t]] dt
// evaluated by quadrature. Throws UnsupportedConfiguration otherwise.
RiskEstimate nr_pr_closed_form(const BaseDistribution& base, const CostFunction& cost,
                               double sigma, double theta);

// Gamma(theta): conditional mean of mu over the gaming set Q(theta).
// Domain error if Q(theta) carries no mass.
double gamma_ratio(const BaseDistribution& base, const CostFunction& cost, double theta);

// Z(p, theta) = p E[1{x in [theta_SL, theta]}(2mu-1)]
//             + (1-p) E[1{x in Q(theta)}(2mu-1)].
double z_function(const BaseDistribution& base, const CostFunction& cost, double p,
                  double theta);

// Roots of mu(theta) - 1/2, Gamma(theta) - 1/2, and Z(p, theta), by bisection.
double solve_theta_sl(const BaseDistribution& base,
                      Interval theta_range = kDefaultThetaRange);
double solve_theta_ps_sm(const BaseDistribution& base, const CostFunction& cost,
                         Interval theta_range = kDefaultThetaRange);
double solve_tau(const BaseDistribution& base, const CostFunction& cost, double p,
                 Interval theta_range = kDefaultThetaRange);

// B(theta): expected cheapest cost for a truly positive agent to be accepted.
// For monotone costs the cheapest accepted point is theta itself.
double social_burden(const BaseDistribution& base, const CostFunction& cost, double theta);

}  // namespace perfsim
