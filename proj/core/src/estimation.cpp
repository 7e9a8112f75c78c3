#include "perfsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "perfsim/numerics.hpp"

namespace perfsim {

namespace {

// One gamma-cost step below / above z (symmetric built-in costs, so the
// reach points serve both directions of the chained construction).
double step_down(const CostFunction& cost, double z) { return cost.reach_points(z).lower; }
double step_up(const CostFunction& cost, double z) { return cost.reach_points(z).upper; }

}  // namespace

Interval construct_theta0(const BaseDistribution& base, const CostFunction& cost,
                          Interval theta_range) {
  double theta_sl = num::bisect([&](double t) { return base.posterior(t) - 0.5; },
                                theta_range.lo, theta_range.hi, 1e-10, 200);
  // A chain step leaving the classifier range clamps to its boundary.
  double lo = theta_sl;
  for (int k = 0; k < 3; ++k) {
    lo = step_down(cost, lo);
    if (lo <= theta_range.lo) {
      lo = theta_range.lo;
      break;
    }
  }
  double hi = theta_sl;
  for (int k = 0; k < 3; ++k) {
    hi = step_up(cost, hi);
    if (hi >= theta_range.hi) {
      hi = theta_range.hi;
      break;
    }
  }
  return {lo, hi};
}

SalientRegion salient_part(Interval theta0, const CostFunction& cost,
                           const BaseDistribution& base) {
  SalientRegion out;
  out.theta0 = theta0;
  out.salient = {step_down(cost, theta0.lo), step_up(cost, theta0.hi)};
  out.zeta = base.mass(out.salient.lo, out.salient.hi, 0) +
             base.mass(out.salient.lo, out.salient.hi, 1);
  return out;
}

ResponseOracle::ResponseOracle(ResponseModel hidden, Interval base_support,
                               RandomSource rng)
    : hidden_(std::move(hidden)),
      clamp_(hidden_.extended_support(base_support)),
      rng_(rng) {}

double ResponseOracle::query(double x, double theta) {
  std::lock_guard<std::mutex> lock(mu_);
  calls_.fetch_add(1);
  AgentTraits t = draw_traits(hidden_, rng_);
  return respond(hidden_, x, t, theta, clamp_);
}

EstimationResult estimate_optimum_via_oracle(ResponseOracle& oracle,
                                             const BaseDistribution& base,
                                             const CostFunction& cost, double epsilon,
                                             Interval theta0, RandomSource& rng,
                                             double n_scale) {
  if (!(epsilon > 0.0)) {
    throw std::domain_error("estimate_optimum_via_oracle: epsilon must be positive");
  }
  SalientRegion region = salient_part(theta0, cost, base);
  long calls_before = oracle.call_count();

  // Per-label sample sizes from the empirical-CDF concentration rate;
  // the hidden constants default to 1 (n_scale overrides).
  double zeta_y[2];
  long n_y[2];
  for (int y = 0; y < 2; ++y) {
    zeta_y[y] = base.mass(region.salient.lo, region.salient.hi, y);
    double raw = zeta_y[y] * zeta_y[y] * std::log(1.0 / epsilon) / (2.0 * epsilon * epsilon);
    n_y[y] = std::max(1L, static_cast<long>(std::ceil(n_scale * raw)));
  }
  double in_salient = zeta_y[0] + zeta_y[1];
  // Misclassification outside the salient part is theta-free on theta0:
  // those agents cannot cross any threshold there.
  double outside = (base.label_mass(0) - base.cdf(region.salient.hi, 0)) +
                   base.cdf(region.salient.lo, 1);

  int net_points = static_cast<int>(std::floor(theta0.width() / epsilon + 1e-12)) + 1;
  double best_pr = 0.0;
  double best_theta = theta0.lo;
  for (int k = 0; k < net_points; ++k) {
    double theta = theta0.lo + k * epsilon;
    double pr = outside;
    for (int y = 0; y < 2; ++y) {
      if (!(zeta_y[y] > 0.0)) continue;
      long accepted = 0;
      for (long i = 0; i < n_y[y]; ++i) {
        // Rejection-sample the base conditional on (y, x in S).
        double x = 0.0;
        int guard = 0;
        do {
          x = base.sample_conditional(y, rng);
          if (++guard > 1000000) {
            throw std::runtime_error("estimate_optimum_via_oracle: salient part too thin");
          }
        } while (!region.salient.contains(x));
        double xp = oracle.query(x, theta);
        accepted += xp >= theta ? 1 : 0;
      }
      double frac = static_cast<double>(accepted) / static_cast<double>(n_y[y]);
      pr += zeta_y[y] * (y == 0 ? frac : 1.0 - frac);
    }
    if (k == 0 || pr < best_pr) {
      best_pr = pr;
      best_theta = theta;
    }
  }

  EstimationResult out;
  out.theta_hat = best_theta;
  out.pr_hat = best_pr;
  out.calls = oracle.call_count() - calls_before;
  out.epsilon = epsilon;
  out.zeta = in_salient;
  out.region = region;
  return out;
}

double estimate_sigma(std::span<const double> survey, double true_theta) {
  if (survey.empty()) throw std::domain_error("estimate_sigma: empty survey");
  double acc = 0.0;
  for (double v : survey) acc += (v - true_theta) * (v - true_theta);
  return std::sqrt(acc / static_cast<double>(survey.size()));
}

double tv_lipschitz_bound(double sigma, double theta, double theta_prime) {
  if (!(sigma > 0.0)) throw std::invalid_argument("tv_lipschitz_bound: sigma > 0");
  return std::abs(theta - theta_prime) / (2.0 * sigma);
}

double tv_sigma_bound(double sigma, double sigma_hat, int m) {
  if (!(sigma > 0.0) || !(sigma_hat > 0.0)) {
    throw std::invalid_argument("tv_sigma_bound: scales must be positive");
  }
  double s2 = sigma * sigma;
  double h2 = sigma_hat * sigma_hat;
  return 0.5 * std::sqrt(std::abs(s2 - h2) * m / std::min(s2, h2));
}

double pr_suboptimality_bound(double tv_sup) { return 2.0 * tv_sup; }

double sigma_mismatch_pr_bound(double sigma, double sigma_hat, int m) {
  return pr_suboptimality_bound(tv_sigma_bound(sigma, sigma_hat, m));
}

}  // namespace perfsim
