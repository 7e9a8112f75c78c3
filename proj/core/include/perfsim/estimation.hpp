#pragma once

#include <atomic>
#include <mutex>
#include <span>
#include <string>

#include "perfsim/classifier.hpp"
#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/response.hpp"

namespace perfsim {

struct SalientRegion {
  Interval theta0;   // search interval containing the performative optimum
  Interval salient;  // features able to change their outcome for some theta in theta0
  double zeta = 0.0;  // base mass of the salient part
};

// Theta_0 via three chained gamma-cost steps on each side of theta_SL,
// clipped to the classifier range. Contains the performative optimum of
// every expenditure-constrained, expenditure-monotone model.
Interval construct_theta0(const BaseDistribution& base, const CostFunction& cost,
                          Interval theta_range = kDefaultThetaRange);

// One more gamma-cost step beyond each endpoint; zeta via the base CDF.
SalientRegion salient_part(Interval theta0, const CostFunction& cost,
                           const BaseDistribution& base);

// Black-box access to a hidden response model: each query draws a fresh
// agent at the requested features and returns one response. Synchronized;
// the call counter increments exactly once per query.
class ResponseOracle {
 public:
  ResponseOracle(ResponseModel hidden, Interval base_support, RandomSource rng);
  double query(double x, double theta);
  long call_count() const { return calls_.load(); }

 private:
  ResponseModel hidden_;
  Interval clamp_;
  RandomSource rng_;
  std::atomic<long> calls_{0};
  std::mutex mu_;
};

struct EstimationResult {
  double theta_hat = 0.0;
  long calls = 0;
  double pr_hat = 0.0;   // estimated PR at theta_hat
  double epsilon = 0.0;
  double zeta = 0.0;
  SalientRegion region;
};

// Two-stage offline estimator: build an epsilon net over theta0, estimate
// per-label response distributions from oracle draws restricted to the
// salient part, splice them with the analytic base outside it, and return
// the net argmin of the estimated performative risk. Per-label sample sizes
// default to ceil(P[x in S, y]^2 ln(1/eps) / (2 eps^2)) scaled by n_scale.
EstimationResult estimate_optimum_via_oracle(ResponseOracle& oracle,
                                             const BaseDistribution& base,
                                             const CostFunction& cost, double epsilon,
                                             Interval theta0, RandomSource& rng,
                                             double n_scale = 1.0);

// RMS of survey deviations from the deployed threshold (maximum-likelihood
// scale for centered Gaussian perception noise).
double estimate_sigma(std::span<const double> survey, double true_theta);

// |theta - theta'| / (2 sigma).
double tv_lipschitz_bound(double sigma, double theta, double theta_prime);
// (1/2) sqrt(|sigma^2 - sigma_hat^2| m / min(sigma^2, sigma_hat^2)).
double tv_sigma_bound(double sigma, double sigma_hat, int m);
// PR suboptimality from a uniform TV error: 2 sup_theta TV.
double pr_suboptimality_bound(double tv_sup);
// Composition of the two: sqrt(|sigma^2 - sigma_hat^2| m / min(...)).
double sigma_mismatch_pr_bound(double sigma, double sigma_hat, int m);

}  // namespace perfsim
