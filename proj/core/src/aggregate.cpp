#include "perfsim/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "perfsim/numerics.hpp"
#include "perfsim/risk.hpp"

namespace perfsim {

AggregateSample sample_map(const ResponseModel& model, const BaseDistribution& base,
                           double theta, int n, RandomSource& rng) {
  if (n < 1) throw std::invalid_argument("sample_map: n must be >= 1");
  Interval clamp = model.extended_support(base.support());
  AggregateSample out;
  out.theta = theta;
  out.x_prime.resize(static_cast<std::size_t>(n));
  out.labels.resize(static_cast<std::size_t>(n));
  out.provenance = {model.describe(), rng.seed(), rng.stream(), n};
  for (int i = 0; i < n; ++i) {
    AgentDraw d = draw_agent(model, base, rng);
    out.x_prime[static_cast<std::size_t>(i)] = respond(model, d.x, d.traits(), theta, clamp);
    out.labels[static_cast<std::size_t>(i)] = d.y;
  }
  return out;
}

double sm_point_mass(const BaseDistribution& base, const CostFunction& cost, double theta) {
  double lo = gaming_lower_bound(cost, base.support(), theta);
  if (theta <= lo) return 0.0;
  return base.mass(lo, theta, 0) + base.mass(lo, theta, 1);
}

double nr_density(const BaseDistribution& base, const CostFunction& cost, double sigma,
                  double theta, double x_prime, int y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("nr_density: sigma must be positive");
  ReachPoints reach = cost.reach_points(x_prime);
  // Stayers at x': keep features unless the perceived threshold falls in
  // (x', u_{x'}].
  double stay = base.pdf(x_prime, y) *
                (1.0 - (num::Phi((reach.upper - theta) / sigma) -
                        num::Phi((x_prime - theta) / sigma)));
  // Movers onto x': perceive the threshold exactly at x' and can afford it.
  double movers = num::gaussian_pdf(x_prime - theta, 0.0, sigma) *
                  base.mass(std::max(reach.lower, base.support().lo), x_prime, y);
  return stay + movers;
}

void DensityProfile::write_csv(std::ostream& os) const {
  for (const auto& [loc, w] : point_masses) {
    os << "# atom," << num::format_double(loc) << "," << num::format_double(w) << "\n";
  }
  os << "grid_x,density_y0,density_y1\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << num::format_double(grid[i]) << "," << num::format_double(density_y0[i]) << ","
       << num::format_double(density_y1[i]) << "\n";
  }
}

DensityProfile density_profile(const ResponseModel& model, const BaseDistribution& base,
                               double theta, std::span<const double> grid, int n,
                               RandomSource& rng) {
  if (grid.size() < 3) throw std::invalid_argument("density_profile: grid too small");
  Interval xprime = model.extended_support(base.support());
  if (grid.front() > xprime.lo + 1e-9 || grid.back() < xprime.hi - 1e-9) {
    throw std::invalid_argument("density_profile: grid must cover X'");
  }
  DensityProfile out;
  out.grid.assign(grid.begin(), grid.end());
  out.density_y0.assign(grid.size(), 0.0);
  out.density_y1.assign(grid.size(), 0.0);

  if (model.kind() == ResponseKind::kNoisy) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double x = base.support().clamp(grid[i]);
      out.density_y0[i] = nr_density(base, model.cost(), model.sigma(), theta, x, 0);
      out.density_y1[i] = nr_density(base, model.cost(), model.sigma(), theta, x, 1);
    }
    return out;
  }

  // Histogram with grid points as bin centers; the exact-equality atom at
  // theta is counted separately so the continuous part stays a density.
  AggregateSample s = sample_map(model, base, theta, n, rng);
  long atom0 = 0;
  long atom1 = 0;
  std::vector<long> count0(grid.size(), 0);
  std::vector<long> count1(grid.size(), 0);
  for (long i = 0; i < s.size(); ++i) {
    double x = s.x_prime[static_cast<std::size_t>(i)];
    int y = s.labels[static_cast<std::size_t>(i)];
    if (model.effective_kind() == ResponseKind::kStandard && x == theta) {
      (y == 0 ? atom0 : atom1) += 1;
      continue;
    }
    auto it = std::lower_bound(out.grid.begin(), out.grid.end(), x);
    std::size_t j = static_cast<std::size_t>(it - out.grid.begin());
    if (j > 0 && (j == out.grid.size() || out.grid[j] - x > x - out.grid[j - 1])) --j;
    (y == 0 ? count0 : count1)[j] += 1;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double left = (i == 0) ? grid[0] : 0.5 * (grid[i - 1] + grid[i]);
    double right = (i + 1 == grid.size()) ? grid[i] : 0.5 * (grid[i] + grid[i + 1]);
    double w = std::max(right - left, 1e-300);
    out.density_y0[i] = static_cast<double>(count0[i]) / (w * n);
    out.density_y1[i] = static_cast<double>(count1[i]) / (w * n);
  }
  if (atom0 + atom1 > 0) {
    out.point_masses.emplace_back(theta, static_cast<double>(atom0 + atom1) / n);
  }
  return out;
}

namespace {

std::vector<double> sorted_features(const AggregateSample& s) {
  std::vector<double> xs(s.x_prime);
  std::sort(xs.begin(), xs.end());
  return xs;
}

double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double best = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

// Area between empirical CDFs; exact W1 for equal-size samples reduces to
// the mean absolute difference of order statistics.
double w1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() == b.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
  }
  // General case: integrate |F_a - F_b| over the merged support.
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(a.front(), b.front());
  double acc = 0.0;
  while (i < a.size() || j < b.size()) {
    double v = (i < a.size() && (j == b.size() || a[i] <= b[j])) ? a[i] : b[j];
    acc += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (v - prev);
    prev = v;
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
  }
  return acc;
}

struct BinnedPair {
  std::vector<double> pa;
  std::vector<double> pb;
};

BinnedPair bin_pair(const AggregateSample& a, const AggregateSample& b, int bins) {
  double lo = *std::min_element(a.x_prime.begin(), a.x_prime.end());
  double hi = *std::max_element(a.x_prime.begin(), a.x_prime.end());
  lo = std::min(lo, *std::min_element(b.x_prime.begin(), b.x_prime.end()));
  hi = std::max(hi, *std::max_element(b.x_prime.begin(), b.x_prime.end()));
  double w = (hi - lo) / bins;
  if (!(w > 0.0)) w = 1.0;
  BinnedPair out;
  out.pa.assign(static_cast<std::size_t>(bins), 0.0);
  out.pb.assign(static_cast<std::size_t>(bins), 0.0);
  auto fill = [&](const std::vector<double>& xs, std::vector<double>& p) {
    for (double x : xs) {
      int k = static_cast<int>((x - lo) / w);
      k = std::clamp(k, 0, bins - 1);
      p[static_cast<std::size_t>(k)] += 1.0 / static_cast<double>(xs.size());
    }
  };
  fill(a.x_prime, out.pa);
  fill(b.x_prime, out.pb);
  return out;
}

}  // namespace

double empirical_distance(const AggregateSample& a, const AggregateSample& b,
                          DistanceMetric metric, int bins) {
  if (a.x_prime.empty() || b.x_prime.empty()) {
    throw std::invalid_argument("empirical_distance: empty sample");
  }
  switch (metric) {
    case DistanceMetric::kKS:
      return ks_distance(sorted_features(a), sorted_features(b));
    case DistanceMetric::kW1:
      return w1_distance(sorted_features(a), sorted_features(b));
    case DistanceMetric::kTVBinned: {
      if (bins < 10) throw std::invalid_argument("empirical_distance: bins must be >= 10");
      BinnedPair p = bin_pair(a, b, bins);
      double acc = 0.0;
      for (std::size_t i = 0; i < p.pa.size(); ++i) acc += std::abs(p.pa[i] - p.pb[i]);
      return 0.5 * acc;
    }
  }
  throw std::logic_error("empirical_distance: unreachable");
}

double tv_estimator_error(const AggregateSample& a, const AggregateSample& b, int bins) {
  BinnedPair p = bin_pair(a, b, bins);
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.pa.size(); ++i) {
    double var = p.pa[i] * (1.0 - p.pa[i]) / na + p.pb[i] * (1.0 - p.pb[i]) / nb;
    acc += std::sqrt(var);
  }
  return 0.5 * std::sqrt(2.0 / 3.14159265358979323846) * acc;
}

SmoothnessReport smoothness_diagnostic(const ResponseModel& model,
                                       const BaseDistribution& base,
                                       std::span<const double> theta_values,
                                       std::span<const double> theta_prime_grid,
                                       double delta, int n, RandomSource& rng) {
  if (!(delta > 0.0)) throw std::invalid_argument("smoothness_diagnostic: delta > 0");
  SmoothnessReport rep;
  std::uint64_t task = 0;
  for (double theta : theta_values) {
    RandomSource local = rng.split(task++);
    AggregateSample s = sample_map(model, base, theta, n, local);
    EmpiricalRisk risk(s.x_prime, s.labels);
    double prev_d = 0.0;
    double prev_se = 0.0;
    bool have_prev = false;
    for (double tp : theta_prime_grid) {
      double d = (risk(tp + delta) - risk(tp - delta)) / (2.0 * delta);
      double m = static_cast<double>(risk.points_in(tp - delta, tp + delta));
      double se = std::sqrt(std::max(m, 1.0)) / (static_cast<double>(n) * 2.0 * delta);
      SmoothnessEntry e{theta, tp, d, 0.0, 0.0, false};
      if (have_prev) {
        e.jump = std::abs(d - prev_d);
        e.noise_floor = std::sqrt(prev_se * prev_se + se * se);
        e.flagged = e.jump > 5.0 * e.noise_floor;
        if (e.flagged) {
          rep.any_flagged = true;
          rep.flags.emplace_back(theta, tp);
        }
      }
      rep.entries.push_back(e);
      prev_d = d;
      prev_se = se;
      have_prev = true;
    }
  }
  return rep;
}

SmoothnessReport smoothness_diagnostic(const ResponseModel& model,
                                       const BaseDistribution& base,
                                       std::span<const double> theta_grid, double delta,
                                       int n, RandomSource& rng) {
  std::vector<double> deciles;
  for (int k = 1; k <= 9; ++k) {
    deciles.push_back(theta_grid[theta_grid.size() * static_cast<std::size_t>(k) / 10]);
  }
  return smoothness_diagnostic(model, base, deciles, theta_grid, delta, n, rng);
}

std::vector<CounterexamplePoint> wasserstein_counterexample(
    std::span<const double> epsilons, int n, RandomSource& rng) {
  // Uniform feature marginal on [0, 1] inside a wide feature space, so
  // that manipulation targets slightly above 1 stay inside X.
  BaseDistribution base({{0, 0.5, ComponentKind::kUniform, 0.0, 1.0},
                         {1, 0.5, ComponentKind::kUniform, 0.0, 1.0}},
                        Interval{-10.0, 10.0});
  ResponseModel model = ResponseModel::standard(CostFunction::squared_difference(1.0));
  std::vector<CounterexamplePoint> out;
  std::uint64_t task = 0;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("wasserstein_counterexample: eps > 0");
    RandomSource ra = rng.split(task++);
    RandomSource rb = rng.split(task++);
    AggregateSample a = sample_map(model, base, 1.0, n, ra);
    AggregateSample b = sample_map(model, base, 1.0 + eps, n, rb);
    double w1 = empirical_distance(a, b, DistanceMetric::kW1);
    out.push_back({eps, w1, w1 / eps});
  }
  return out;
}

}  // namespace perfsim
