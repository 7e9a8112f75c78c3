#pragma once

#include <utility>
#include <vector>

#include "perfsim/interval.hpp"
#include "perfsim/random.hpp"

namespace perfsim {

enum class ComponentKind { kGaussian, kUniform };

// One mixture component of the pre-strategic population, tied to a label.
// For kGaussian, a/b are mean/std; for kUniform they are lo/hi.
struct Component {
  int label = 0;
  double weight = 0.0;
  ComponentKind kind = ComponentKind::kGaussian;
  double a = 0.0;
  double b = 1.0;
};

// The base population D_XY over (x, y): a mixture of Gaussian or uniform
// components per label on a closed support X. Gaussians are sampled
// untruncated; construction requires each component's mass outside X to be
// below 1e-6 so the continuous-population assumptions hold numerically.
class BaseDistribution {
 public:
  BaseDistribution(std::vector<Component> components, Interval support);

  // Joint density of (x, y); x must lie in X (domain_error otherwise).
  double pdf(double x, int y) const;
  double marginal_pdf(double x) const;
  // Posterior mu(x) = pdf(x,1) / (pdf(x,0) + pdf(x,1)).
  double posterior(double x) const;

  // P[X <= x, Y = y] and friends; defined on the whole real line.
  double cdf(double x, int y) const;
  double marginal_cdf(double x) const;
  double mass(double a, double b, int y) const;  // P[a < x <= b, y]
  double label_mass(int y) const;                // P[y]

  Interval support() const { return support_; }
  const std::vector<Component>& components() const { return components_; }

  std::pair<double, int> sample_one(RandomSource& rng) const;
  void sample(int n, RandomSource& rng, std::vector<double>& xs,
              std::vector<int>& ys) const;
  // Draw x from the conditional distribution given the label.
  double sample_conditional(int y, RandomSource& rng) const;

  // The Setup-1 population: half N(0, (1/3)^2) with label 0, half
  // N(1, (1/3)^2) with label 1, on X = [-5, 6].
  static BaseDistribution symmetric_gaussian_mixture();
  // Uniform feature marginal on [0, 1] with label-balanced components.
  static BaseDistribution uniform_unit();
  // Single-Gaussian feature marginal split evenly across labels.
  static BaseDistribution single_gaussian(double mean, double std, Interval support);

 private:
  std::vector<Component> components_;
  std::vector<double> cum_weights_;
  Interval support_;
  double label1_mass_ = 0.0;
};

}  // namespace perfsim
