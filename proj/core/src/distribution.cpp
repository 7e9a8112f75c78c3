#include "perfsim/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "perfsim/numerics.hpp"

namespace perfsim {

namespace {

double component_pdf(const Component& c, double x) {
  if (c.kind == ComponentKind::kGaussian) {
    return num::gaussian_pdf(x, c.a, c.b);
  }
  return (x >= c.a && x <= c.b) ? 1.0 / (c.b - c.a) : 0.0;
}

double component_cdf(const Component& c, double x) {
  if (c.kind == ComponentKind::kGaussian) {
    return num::gaussian_cdf(x, c.a, c.b);
  }
  if (x <= c.a) return 0.0;
  if (x >= c.b) return 1.0;
  return (x - c.a) / (c.b - c.a);
}

double mass_outside(const Component& c, Interval X) {
  return 1.0 - (component_cdf(c, X.hi) - component_cdf(c, X.lo));
}

}  // namespace

BaseDistribution::BaseDistribution(std::vector<Component> components, Interval support)
    : components_(std::move(components)), support_(support) {
  if (components_.empty()) {
    throw std::invalid_argument("BaseDistribution: no components");
  }
  if (!(support_.lo < support_.hi)) {
    throw std::invalid_argument("BaseDistribution: empty support");
  }
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.label != 0 && c.label != 1) {
      throw std::invalid_argument("BaseDistribution: label must be 0 or 1");
    }
    if (!(c.weight > 0.0)) {
      throw std::invalid_argument("BaseDistribution: component weight must be positive");
    }
    if (c.kind == ComponentKind::kGaussian && !(c.b > 0.0)) {
      throw std::invalid_argument("BaseDistribution: gaussian std must be positive");
    }
    if (c.kind == ComponentKind::kUniform && !(c.a < c.b)) {
      throw std::invalid_argument("BaseDistribution: uniform needs lo < hi");
    }
    if (mass_outside(c, support_) >= 1e-6) {
      throw std::invalid_argument(
          "BaseDistribution: component mass outside the support exceeds 1e-6");
    }
    total += c.weight;
    cum_weights_.push_back(total);
    if (c.label == 1) label1_mass_ += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("BaseDistribution: weights must sum to 1 (tol 1e-12), got " +
                                std::to_string(total));
  }
  cum_weights_.back() = 1.0;
}

double BaseDistribution::pdf(double x, int y) const {
  if (!support_.contains(x)) {
    throw std::domain_error("BaseDistribution::pdf: x outside the support");
  }
  double acc = 0.0;
  for (const auto& c : components_) {
    if (c.label == y) acc += c.weight * component_pdf(c, x);
  }
  return acc;
}

double BaseDistribution::marginal_pdf(double x) const { return pdf(x, 0) + pdf(x, 1); }

double BaseDistribution::posterior(double x) const {
  double p1 = pdf(x, 1);
  double m = pdf(x, 0) + p1;
  return p1 / m;
}

double BaseDistribution::cdf(double x, int y) const {
  double acc = 0.0;
  for (const auto& c : components_) {
    if (c.label == y) acc += c.weight * component_cdf(c, x);
  }
  return acc;
}

double BaseDistribution::marginal_cdf(double x) const { return cdf(x, 0) + cdf(x, 1); }

double BaseDistribution::mass(double a, double b, int y) const {
  if (b <= a) return 0.0;
  return cdf(b, y) - cdf(a, y);
}

double BaseDistribution::label_mass(int y) const {
  return y == 1 ? label1_mass_ : 1.0 - label1_mass_;
}

std::pair<double, int> BaseDistribution::sample_one(RandomSource& rng) const {
  double u = rng.uniform01();
  std::size_t i = 0;
  while (i + 1 < cum_weights_.size() && u >= cum_weights_[i]) ++i;
  const Component& c = components_[i];
  double x = (c.kind == ComponentKind::kGaussian) ? rng.normal(c.a, c.b)
                                                  : rng.uniform(c.a, c.b);
  return {x, c.label};
}

void BaseDistribution::sample(int n, RandomSource& rng, std::vector<double>& xs,
                              std::vector<int>& ys) const {
  if (n < 1) throw std::invalid_argument("BaseDistribution::sample: n must be >= 1");
  xs.resize(static_cast<std::size_t>(n));
  ys.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto [x, y] = sample_one(rng);
    xs[static_cast<std::size_t>(i)] = x;
    ys[static_cast<std::size_t>(i)] = y;
  }
}

double BaseDistribution::sample_conditional(int y, RandomSource& rng) const {
  double total = label_mass(y);
  if (!(total > 0.0)) {
    throw std::domain_error("BaseDistribution::sample_conditional: label has no mass");
  }
  double u = rng.uniform01() * total;
  double acc = 0.0;
  for (const auto& c : components_) {
    if (c.label != y) continue;
    acc += c.weight;
    if (u < acc || &c == &components_.back()) {
      return (c.kind == ComponentKind::kGaussian) ? rng.normal(c.a, c.b)
                                                  : rng.uniform(c.a, c.b);
    }
  }
  // Falls through only on floating slop in the final bucket.
  for (auto it = components_.rbegin(); it != components_.rend(); ++it) {
    if (it->label == y) {
      return (it->kind == ComponentKind::kGaussian) ? rng.normal(it->a, it->b)
                                                    : rng.uniform(it->a, it->b);
    }
  }
  throw std::logic_error("BaseDistribution::sample_conditional: unreachable");
}

BaseDistribution BaseDistribution::symmetric_gaussian_mixture() {
  const double s = 1.0 / 3.0;
  return BaseDistribution({{0, 0.5, ComponentKind::kGaussian, 0.0, s},
                           {1, 0.5, ComponentKind::kGaussian, 1.0, s}},
                          Interval{-5.0, 6.0});
}

BaseDistribution BaseDistribution::uniform_unit() {
  return BaseDistribution({{0, 0.5, ComponentKind::kUniform, 0.0, 1.0},
                           {1, 0.5, ComponentKind::kUniform, 0.0, 1.0}},
                          Interval{0.0, 1.0});
}

BaseDistribution BaseDistribution::single_gaussian(double mean, double std, Interval support) {
  return BaseDistribution({{0, 0.5, ComponentKind::kGaussian, mean, std},
                           {1, 0.5, ComponentKind::kGaussian, mean, std}},
                          support);
}

}  // namespace perfsim
