#include "perfsim/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "perfsim/errors.hpp"
#include "perfsim/numerics.hpp"

namespace perfsim {

EmpiricalRisk::EmpiricalRisk(std::span<const double> x_prime, std::span<const int> labels) {
  if (x_prime.size() != labels.size()) {
    throw std::invalid_argument("EmpiricalRisk: size mismatch");
  }
  if (x_prime.empty()) throw std::invalid_argument("EmpiricalRisk: empty sample");
  std::vector<std::size_t> order(x_prime.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x_prime[a] < x_prime[b]; });
  xs_.resize(order.size());
  pos_prefix_.resize(order.size() + 1);
  pos_prefix_[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs_[i] = x_prime[order[i]];
    pos_prefix_[i + 1] = pos_prefix_[i] + (labels[order[i]] == 1 ? 1 : 0);
  }
}

long EmpiricalRisk::misclassified(double theta_eval) const {
  auto it = std::lower_bound(xs_.begin(), xs_.end(), theta_eval);
  long below = static_cast<long>(it - xs_.begin());
  long pos_below = pos_prefix_[static_cast<std::size_t>(below)];
  long total_pos = pos_prefix_.back();
  long neg_at_or_above = (size() - below) - (total_pos - pos_below);
  return neg_at_or_above + pos_below;
}

double EmpiricalRisk::operator()(double theta_eval) const {
  return static_cast<double>(misclassified(theta_eval)) / static_cast<double>(size());
}

long EmpiricalRisk::points_in(double lo, double hi) const {
  auto a = std::lower_bound(xs_.begin(), xs_.end(), lo);
  auto b = std::lower_bound(xs_.begin(), xs_.end(), hi);
  return static_cast<long>(b - a);
}

namespace {

EmpiricalRisk sample_risk(const ResponseModel& model, const BaseDistribution& base,
                          double theta, int n, RandomSource& rng) {
  if (n < 1) throw std::invalid_argument("decoupled_pr: n must be >= 1");
  Interval clamp = model.extended_support(base.support());
  std::vector<double> xp(static_cast<std::size_t>(n));
  std::vector<int> ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    AgentDraw d = draw_agent(model, base, rng);
    xp[static_cast<std::size_t>(i)] = respond(model, d.x, d.traits(), theta, clamp);
    ys[static_cast<std::size_t>(i)] = d.y;
  }
  return EmpiricalRisk(xp, ys);
}

RiskEstimate mc_estimate(double value, long n) {
  RiskEstimate e;
  e.value = value;
  e.n = n;
  e.std_error = std::sqrt(value * (1.0 - value) / static_cast<double>(n));
  e.method = RiskMethod::kMonteCarlo;
  return e;
}

}  // namespace

RiskEstimate decoupled_pr(const ResponseModel& model, const BaseDistribution& base,
                          double theta, double theta_eval, int n, RandomSource& rng) {
  EmpiricalRisk risk = sample_risk(model, base, theta, n, rng);
  return mc_estimate(risk(theta_eval), risk.size());
}

std::vector<RiskEstimate> decoupled_pr_sweep(const ResponseModel& model,
                                             const BaseDistribution& base, double theta,
                                             std::span<const double> theta_evals, int n,
                                             RandomSource& rng) {
  EmpiricalRisk risk = sample_risk(model, base, theta, n, rng);
  std::vector<RiskEstimate> out;
  out.reserve(theta_evals.size());
  for (double te : theta_evals) out.push_back(mc_estimate(risk(te), risk.size()));
  return out;
}

RiskEstimate performative_risk(const ResponseModel& model, const BaseDistribution& base,
                               double theta, int n, RandomSource& rng) {
  return decoupled_pr(model, base, theta, theta, n, rng);
}

double base_risk(const BaseDistribution& base, double theta) {
  // P[y=0, x >= theta] + P[y=1, x < theta].
  return (base.label_mass(0) - base.cdf(theta, 0)) + base.cdf(theta, 1);
}

RiskEstimate nr_pr_closed_form(const BaseDistribution& base, const CostFunction& cost,
                               double sigma, double theta) {
  if (cost.kind() != CostKind::kLinear || cost.alpha() != 1.0 || cost.gamma() != 1.0) {
    throw UnsupportedConfiguration(
        "nr_pr_closed_form: derived for the unit linear cost only");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("nr_pr_closed_form: sigma > 0");
  double tail0 = base.label_mass(0) - base.cdf(theta, 0);
  double tail1 = base.cdf(theta - 1.0, 1);
  double gap_neg = base.mass(theta - 1.0, theta, 0);
  Interval X = base.support();
  auto integrand = [&](double t) {
    double x = theta - 1.0 + t;
    if (!X.contains(x)) return 0.0;
    double diff = base.pdf(x, 1) - base.pdf(x, 0);
    double miss = 1.0 - (num::Phi(t / sigma) - 0.5);
    return diff * miss;
  };
  double gap_correction = num::trapezoid(integrand, 0.0, 1.0, 2001);
  RiskEstimate e;
  e.value = tail0 + tail1 + gap_neg + gap_correction;
  e.method = RiskMethod::kClosedForm;
  return e;
}

namespace {

// E[(2 mu(x) - 1) 1{a < x <= b}] = P[y=1, x in (a,b]] - P[y=0, x in (a,b]].
double signed_mass(const BaseDistribution& base, double a, double b) {
  return base.mass(a, b, 1) - base.mass(a, b, 0);
}

struct GamingSet {
  double lo = 0.0;
  double hi = 0.0;  // theta
};

GamingSet gaming_set(const BaseDistribution& base, const CostFunction& cost, double theta) {
  return {gaming_lower_bound(cost, base.support(), theta), theta};
}

}  // namespace

double gamma_ratio(const BaseDistribution& base, const CostFunction& cost, double theta) {
  GamingSet q = gaming_set(base, cost, theta);
  double denom = base.mass(q.lo, q.hi, 0) + base.mass(q.lo, q.hi, 1);
  if (!(denom > 0.0)) {
    throw std::domain_error("gamma_ratio: gaming set carries no mass");
  }
  return base.mass(q.lo, q.hi, 1) / denom;
}

double z_function(const BaseDistribution& base, const CostFunction& cost, double p,
                  double theta) {
  double theta_sl = solve_theta_sl(base);
  GamingSet q = gaming_set(base, cost, theta);
  return p * signed_mass(base, theta_sl, theta) + (1.0 - p) * signed_mass(base, q.lo, q.hi);
}

double solve_theta_sl(const BaseDistribution& base, Interval theta_range) {
  return num::bisect([&](double t) { return base.posterior(t) - 0.5; }, theta_range.lo,
                     theta_range.hi, 1e-10, 200);
}

double solve_theta_ps_sm(const BaseDistribution& base, const CostFunction& cost,
                         Interval theta_range) {
  double theta_sl = solve_theta_sl(base, theta_range);
  return num::bisect([&](double t) { return gamma_ratio(base, cost, t) - 0.5; },
                     theta_sl + 1e-6, theta_range.hi, 1e-10, 200);
}

double solve_tau(const BaseDistribution& base, const CostFunction& cost, double p,
                 Interval theta_range) {
  double theta_sl = solve_theta_sl(base, theta_range);
  double theta_ps = solve_theta_ps_sm(base, cost, theta_range);
  return num::bisect([&](double t) { return z_function(base, cost, p, t); },
                     theta_sl + 1e-9, theta_ps, 1e-10, 200);
}

double social_burden(const BaseDistribution& base, const CostFunction& cost, double theta) {
  Interval X = base.support();
  double pos = base.label_mass(1);
  if (!(pos > 0.0)) throw std::domain_error("social_burden: no positive mass");
  if (theta <= X.lo) return 0.0;
  auto integrand = [&](double x) { return cost(x, theta) * base.pdf(x, 1); };
  return num::trapezoid(integrand, X.lo, std::min(theta, X.hi), 2001) / pos;
}

}  // namespace perfsim
