#include "perfsim/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "perfsim/numerics.hpp"

namespace perfsim {

CostFunction::CostFunction(CostKind kind, double alpha, double gamma)
    : kind_(kind), alpha_(alpha), gamma_(gamma) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("CostFunction: gamma must be positive");
}

CostFunction CostFunction::linear(double alpha, double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("CostFunction: alpha must be positive");
  return CostFunction(CostKind::kLinear, alpha, gamma);
}

CostFunction CostFunction::squared_difference(double gamma) {
  return CostFunction(CostKind::kSquaredDifference, 1.0, gamma);
}

double CostFunction::operator()(double from, double to) const {
  if (kind_ == CostKind::kLinear) return alpha_ * std::abs(to - from);
  return std::abs(from * from - to * to);
}

namespace {

// Bisection polish of an analytic root candidate. Falls back to the
// candidate when the budget is only touched, not crossed (tangency).
template <class F>
double polish(double candidate, F&& f) {
  double d = 1e-6 * (1.0 + std::abs(candidate));
  double lo = candidate - d;
  double hi = candidate + d;
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) != (fhi > 0.0)) return num::bisect(f, lo, hi, 1e-12, 200);
  return candidate;
}

}  // namespace

ReachPoints CostFunction::reach_points(double x) const {
  const double g = gamma_;
  double lower_candidate;
  double upper_candidate;
  if (kind_ == CostKind::kLinear) {
    lower_candidate = x - g / alpha_;
    upper_candidate = x + g / alpha_;
  } else {
    // First crossing of |t^2 - x^2| = g moving away from x. Away from x the
    // cost rises, dips back to zero at the mirror point -x if the path
    // crosses it, then rises again; the cases pick whichever branch crosses
    // the budget first.
    double x2 = x * x;
    if (x >= 0.0) {
      upper_candidate = std::sqrt(x2 + g);
      lower_candidate = (x2 >= g) ? std::sqrt(x2 - g) : -std::sqrt(x2 + g);
    } else {
      lower_candidate = -std::sqrt(x2 + g);
      upper_candidate = (x2 >= g) ? -std::sqrt(x2 - g) : std::sqrt(x2 + g);
    }
  }
  ReachPoints out;
  out.lower = polish(lower_candidate, [&](double t) { return (*this)(t, x) - g; });
  out.upper = polish(upper_candidate, [&](double t) { return (*this)(x, t) - g; });
  if (!(out.lower < x) || !(out.upper > x)) {
    throw std::runtime_error("CostFunction::reach_points: bracketing failed (invalid cost?)");
  }
  return out;
}

std::string CostFunction::describe() const {
  if (kind_ == CostKind::kLinear) {
    return "linear(alpha=" + num::format_double(alpha_) +
           ",gamma=" + num::format_double(gamma_) + ")";
  }
  return "squared_difference(gamma=" + num::format_double(gamma_) + ")";
}

CostCheck check_cost_validity(const std::function<double(double, double)>& cost,
                              Interval domain, int trials, RandomSource& rng) {
  if (trials < 1) throw std::invalid_argument("check_cost_validity: trials must be >= 1");
  for (int i = 0; i < trials; ++i) {
    double x = rng.uniform(domain.lo, domain.hi);
    if (std::abs(cost(x, x)) > 1e-12) {
      return {false, "c(x, x) != 0 at x = " + num::format_double(x)};
    }
    double xp = rng.uniform(domain.lo, domain.hi);
    if (x == xp) continue;
    double t = rng.uniform(0.05, 0.95);
    double mid = x + t * (xp - x);
    if (!(cost(x, mid) < cost(x, xp)) || !(cost(mid, x) < cost(xp, x))) {
      return {false, "cost does not increase along the segment (" + num::format_double(x) +
                         ", " + num::format_double(xp) + ")"};
    }
    // Continuity probe: a vanishing perturbation must vanish in cost.
    double eps = 1e-9 * (1.0 + std::abs(xp));
    if (std::abs(cost(x, xp + eps) - cost(x, xp)) > 1e-5) {
      return {false, "cost jumps under a 1e-9 perturbation near " + num::format_double(xp)};
    }
  }
  return {true, ""};
}

double gaming_lower_bound(const CostFunction& cost, Interval support, double theta) {
  double l = cost.reach_points(theta).lower;
  return std::max(support.lo, l);
}

}  // namespace perfsim
