#pragma once

#include <functional>
#include <string>

#include "perfsim/interval.hpp"
#include "perfsim/random.hpp"

namespace perfsim {

enum class CostKind { kLinear, kSquaredDifference };

struct ReachPoints {
  double lower = 0.0;  // l_x:  l_x < x,  c(l_x, x) = gamma
  double upper = 0.0;  // u_x:  u_x > x,  c(x, u_x) = gamma
};

// Manipulation cost c(x, x') with the reward budget gamma attached
// (one budget per scenario; the population shares it).
class CostFunction {
 public:
  static CostFunction linear(double alpha, double gamma = 1.0);
  static CostFunction squared_difference(double gamma = 1.0);

  double operator()(double from, double to) const;
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  CostKind kind() const { return kind_; }

  // Nearest points on either side of x whose cost to/from x equals gamma,
  // on the extended real line. Found as the first crossing of the budget
  // moving away from x, refined by bisection to 1e-10.
  ReachPoints reach_points(double x) const;

  std::string describe() const;

 private:
  CostFunction(CostKind kind, double alpha, double gamma);
  CostKind kind_;
  double alpha_;
  double gamma_;
};

struct CostCheck {
  bool valid = false;
  std::string reason;
};

// Numerical validity check: zero on the diagonal, strictly increasing along
// segments (sampled triples), and continuous. Rejects e.g. the constant-zero
// cost; accepts both built-in kinds on domains where they are monotone.
CostCheck check_cost_validity(const std::function<double(double, double)>& cost,
                              Interval domain, int trials, RandomSource& rng);

// Lower endpoint of the gaming set Q(theta) = {x < theta : c(x, theta) <= gamma}
// for monotone (Assumption-1) costs, clipped to the support.
double gaming_lower_bound(const CostFunction& cost, Interval support, double theta);

}  // namespace perfsim
