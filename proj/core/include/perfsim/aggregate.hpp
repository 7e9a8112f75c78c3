#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/response.hpp"

namespace perfsim {

struct Provenance {
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int n = 0;
};

// A materialized draw from the distribution map D(theta; M).
struct AggregateSample {
  double theta = 0.0;
  std::vector<double> x_prime;
  std::vector<int> labels;
  Provenance provenance;
  long size() const { return static_cast<long>(x_prime.size()); }
};

AggregateSample sample_map(const ResponseModel& model, const BaseDistribution& base,
                           double theta, int n, RandomSource& rng);

// Mass of the boundary atom under standard microfoundations:
// P_base[x in Q(theta)], via the base CDF.
double sm_point_mass(const BaseDistribution& base, const CostFunction& cost, double theta);

// Closed-form density of D(theta; M_sigma) at (x', y):
//   p_base(x', y) P[eta not in (x'-theta, u_{x'}-theta]]
//   + p_noise(x'-theta) P_base[x in [l_{x'}, x'), y].
double nr_density(const BaseDistribution& base, const CostFunction& cost, double sigma,
                  double theta, double x_prime, int y);

struct DensityProfile {
  std::vector<double> grid;
  std::vector<double> density_y0;
  std::vector<double> density_y1;
  std::vector<std::pair<double, double>> point_masses;  // (location, weight)
  // CSV columns grid_x, density_y0, density_y1; one '# atom' line per atom.
  void write_csv(std::ostream& os) const;
};

// Noisy models evaluate the closed form on the grid; the rest build a
// kernel-free histogram with the boundary atom split out by exact-equality
// counting (standard responses land on theta bit-exactly).
DensityProfile density_profile(const ResponseModel& model, const BaseDistribution& base,
                               double theta, std::span<const double> grid, int n,
                               RandomSource& rng);

enum class DistanceMetric { kKS, kTVBinned, kW1 };

// Distances between the feature marginals of two samples. KS is the largest
// CDF gap, W1 the area between the empirical CDFs (exact in 1-D), TV a
// binned proxy (equal-width bins spanning the pooled range).
double empirical_distance(const AggregateSample& a, const AggregateSample& b,
                          DistanceMetric metric, int bins = 200);

// Expected binned-TV reading between two equal samples (estimator noise);
// bound checks add a multiple of this.
double tv_estimator_error(const AggregateSample& a, const AggregateSample& b,
                          int bins = 200);

struct SmoothnessEntry {
  double theta = 0.0;
  double theta_prime = 0.0;
  double derivative = 0.0;   // central difference of DPR in theta'
  double jump = 0.0;         // |derivative - previous derivative|
  double noise_floor = 0.0;  // MC floor for that jump
  bool flagged = false;
};

struct SmoothnessReport {
  std::vector<SmoothnessEntry> entries;
  bool any_flagged = false;
  std::vector<std::pair<double, double>> flags;  // (theta, theta_prime)
};

// Finite-difference scan of d DPR(theta, theta')/d theta' over theta' for a
// set of deployment thresholds; adjacent estimates jumping by more than five
// local noise floors are flagged as discontinuities.
SmoothnessReport smoothness_diagnostic(const ResponseModel& model,
                                       const BaseDistribution& base,
                                       std::span<const double> theta_values,
                                       std::span<const double> theta_prime_grid,
                                       double delta, int n, RandomSource& rng);

// Convenience overload: deployment thresholds at the interior deciles of the
// grid.
SmoothnessReport smoothness_diagnostic(const ResponseModel& model,
                                       const BaseDistribution& base,
                                       std::span<const double> theta_grid, double delta,
                                       int n, RandomSource& rng);

struct CounterexamplePoint {
  double epsilon = 0.0;
  double w1 = 0.0;
  double ratio = 0.0;  // w1 / epsilon
};

// Uniform base on [0,1], squared-difference cost, standard agents:
// W1(D(1), D(1+eps))/eps blows up like 1/sqrt(eps).
std::vector<CounterexamplePoint> wasserstein_counterexample(
    std::span<const double> epsilons, int n, RandomSource& rng);

}  // namespace perfsim
