#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perfsim/aggregate.hpp"
#include "perfsim/classifier.hpp"
#include "perfsim/numerics.hpp"
#include "perfsim/risk.hpp"

using namespace perfsim;

namespace {
const CostFunction kUnit = CostFunction::linear(1.0, 1.0);

AggregateSample draw(const ResponseModel& m, double theta, int n, std::uint64_t seed) {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource rng(seed, 0);
  return sample_map(m, base, theta, n, rng);
}
}  // namespace

TEST_CASE("sample_map: non-strategic equals the base draw") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource r1(41, 0), r2(41, 0);
  auto s = sample_map(ResponseModel::non_strategic(kUnit), base, 1.0, 5000, r1);
  std::vector<double> xs;
  std::vector<int> ys;
  base.sample(5000, r2, xs, ys);
  CHECK(s.x_prime == xs);
  CHECK(s.labels == ys);
}

TEST_CASE("sample_map: standard model empties the gap and stacks the boundary") {
  auto s = draw(ResponseModel::standard(kUnit), 1.0, 100000, 43);
  long atom = 0;
  long inside = 0;
  double ones = 0.0;
  for (long i = 0; i < s.size(); ++i) {
    double x = s.x_prime[static_cast<std::size_t>(i)];
    if (x == 1.0) ++atom;
    if (x > 0.0 && x < 1.0) ++inside;
    ones += s.labels[static_cast<std::size_t>(i)];
  }
  CHECK(inside == 0);
  double frac = static_cast<double>(atom) / static_cast<double>(s.size());
  // Analytic boundary mass (Gaussian CDF arithmetic): 0.49865.
  double expect = 0.4986501019683699;
  double se = std::sqrt(expect * (1 - expect) / static_cast<double>(s.size()));
  CHECK(std::abs(frac - expect) <= 3 * se);
  // Labels ride through the response untouched.
  CHECK(std::abs(ones / static_cast<double>(s.size()) - 0.5) <=
        3 * std::sqrt(0.25 / static_cast<double>(s.size())));
}

TEST_CASE("sm_point_mass") {
  auto uni = BaseDistribution::uniform_unit();
  CHECK(sm_point_mass(uni, kUnit, 0.7) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(sm_point_mass(uni, kUnit, 0.0) == doctest::Approx(0.0));
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  CHECK(sm_point_mass(base, kUnit, 1.0) ==
        doctest::Approx(0.4986501019683699).epsilon(1e-9));
}

TEST_CASE("nr_density: far tail reduces to the base density") {
  auto base = BaseDistribution::single_gaussian(0.0, 0.5, Interval{-5.0, 6.0});
  for (int y : {0, 1}) {
    double d = nr_density(base, kUnit, 0.1, 0.0, 5.0, y);
    double p = base.pdf(5.0, y);
    CHECK(std::abs(d - p) <= 1e-10 * p);
  }
}

TEST_CASE("nr_density: normalization and positivity") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  auto grid = make_theta_grid(-5.0, 6.0, 11.0 / 2200.0);
  double integral = 0.0;
  double min_density = 1e300;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = nr_density(base, kUnit, 0.3, 1.0, grid[i], 0) +
               nr_density(base, kUnit, 0.3, 1.0, grid[i], 1);
    double b = nr_density(base, kUnit, 0.3, 1.0, grid[i + 1], 0) +
               nr_density(base, kUnit, 0.3, 1.0, grid[i + 1], 1);
    integral += 0.5 * (a + b) * (grid[i + 1] - grid[i]);
    min_density = std::min(min_density, a);
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(min_density > 0.0);  // supported on all of X
}

TEST_CASE("nr_density matches a Monte Carlo histogram (KS)") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  const double sigma = 0.3;
  const double theta = 1.0;
  auto s = draw(ResponseModel::noisy(sigma, kUnit), theta, 200000, 47);
  std::sort(s.x_prime.begin(), s.x_prime.end());
  // Closed-form CDF by cumulative trapezoid over a fine grid.
  auto grid = make_theta_grid(-6.8, 7.8, 14.6 / 4000.0);
  std::vector<double> cdf(grid.size(), 0.0);
  auto marg = [&](double x) {
    double cx = std::clamp(x, -5.0, 6.0);
    return nr_density(base, kUnit, sigma, theta, cx, 0) +
           nr_density(base, kUnit, sigma, theta, cx, 1);
  };
  for (std::size_t i = 1; i < grid.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (marg(grid[i - 1]) + marg(grid[i])) * (grid[i] - grid[i - 1]);
  }
  for (auto& v : cdf) v /= cdf.back();
  double ks = 0.0;
  for (std::size_t i = 0; i < s.x_prime.size(); ++i) {
    double x = s.x_prime[i];
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - grid.begin()),
                                          grid.size() - 1);
    double emp_hi = static_cast<double>(i + 1) / static_cast<double>(s.x_prime.size());
    double emp_lo = static_cast<double>(i) / static_cast<double>(s.x_prime.size());
    ks = std::max(ks, std::max(std::abs(emp_hi - cdf[j]), std::abs(emp_lo - cdf[j])));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("density_profile: histogram branch and atom detection") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  auto grid = make_theta_grid(-5.0, 6.0, 11.0 / 1100.0);
  RandomSource rng(53, 0);
  auto prof = density_profile(ResponseModel::standard(kUnit), base, 1.0, grid, 100000, rng);
  REQUIRE(prof.point_masses.size() == 1);
  CHECK(prof.point_masses[0].first == 1.0);
  CHECK(prof.point_masses[0].second == doctest::Approx(0.49865).epsilon(0.01));
  // Continuous part plus the atom integrates to one.
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = prof.density_y0[i] + prof.density_y1[i];
    double b = prof.density_y0[i + 1] + prof.density_y1[i + 1];
    integral += 0.5 * (a + b) * (grid[i + 1] - grid[i]);
  }
  CHECK(integral + prof.point_masses[0].second == doctest::Approx(1.0).epsilon(1e-3));

  RandomSource rng2(54, 0);
  auto ns = density_profile(ResponseModel::non_strategic(kUnit), base, 1.0, grid, 200000,
                            rng2);
  CHECK(ns.point_masses.empty());
  // Histogram tracks the base pdf.
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < -1.0 || grid[i] > 2.0) continue;
    worst = std::max(worst, std::abs(ns.density_y0[i] + ns.density_y1[i] -
                                     base.marginal_pdf(grid[i])));
  }
  CHECK(worst < 0.12);
}

TEST_CASE("density_profile: noisy closed form, sharper for smaller sigma") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource rng(55, 0);
  auto lo = ResponseModel::noisy(0.1, kUnit);
  auto hi = ResponseModel::noisy(0.5, kUnit);
  auto grid_lo = make_theta_grid(-5.6, 6.6, 12.2 / 1200.0);
  auto grid_hi = make_theta_grid(-8.0, 9.0, 17.0 / 1200.0);
  auto p_lo = density_profile(lo, base, 1.0, grid_lo, 1, rng);
  auto p_hi = density_profile(hi, base, 1.0, grid_hi, 1, rng);
  CHECK(p_lo.point_masses.empty());
  CHECK(p_hi.point_masses.empty());
  auto peak = [](const DensityProfile& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      m = std::max(m, p.density_y0[i] + p.density_y1[i]);
    }
    return m;
  };
  CHECK(peak(p_lo) > peak(p_hi));
}

TEST_CASE("density_profile rejects a grid not covering X'") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource rng(56, 0);
  auto grid = make_theta_grid(-1.0, 2.0, 0.01);
  CHECK_THROWS(density_profile(ResponseModel::standard(kUnit), base, 1.0, grid, 100, rng));
}

TEST_CASE("DensityProfile CSV shape") {
  DensityProfile p;
  p.grid = {0.0, 1.0};
  p.density_y0 = {0.25, 0.25};
  p.density_y1 = {0.25, 0.25};
  p.point_masses = {{1.0, 0.5}};
  std::ostringstream os;
  p.write_csv(os);
  CHECK(os.str() == "# atom,1,0.5\ngrid_x,density_y0,density_y1\n0,0.25,0.25\n1,0.25,0.25\n");
}

TEST_CASE("empirical_distance") {
  auto a = draw(ResponseModel::non_strategic(kUnit), 1.0, 20000, 61);
  CHECK(empirical_distance(a, a, DistanceMetric::kKS) == 0.0);
  CHECK(empirical_distance(a, a, DistanceMetric::kW1) == 0.0);
  CHECK(empirical_distance(a, a, DistanceMetric::kTVBinned) == 0.0);

  AggregateSample empty;
  CHECK_THROWS(empirical_distance(empty, a, DistanceMetric::kKS));
  CHECK_THROWS(empirical_distance(a, a, DistanceMetric::kTVBinned, 5));

  // Shifted unit uniforms: W1 = 0.5 exactly in the population.
  AggregateSample u1, u2;
  RandomSource rng(62, 0);
  for (int i = 0; i < 100000; ++i) {
    double v = rng.uniform01();
    u1.x_prime.push_back(v);
    u1.labels.push_back(0);
    u2.x_prime.push_back(rng.uniform01() + 0.5);
    u2.labels.push_back(0);
  }
  CHECK(empirical_distance(u1, u2, DistanceMetric::kW1) ==
        doctest::Approx(0.5).epsilon(0.02));

  // Standard normals shifted by 0.1: KS = Phi(0.05) - Phi(-0.05).
  AggregateSample g1, g2;
  for (int i = 0; i < 100000; ++i) {
    g1.x_prime.push_back(rng.normal());
    g1.labels.push_back(0);
    g2.x_prime.push_back(rng.normal() + 0.1);
    g2.labels.push_back(0);
  }
  CHECK(empirical_distance(g1, g2, DistanceMetric::kKS) ==
        doctest::Approx(0.0398776).scale(1).epsilon(0.01));
}

TEST_CASE("smoothness diagnostic: dichotomy between noisy and standard mixtures") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  auto grid = default_theta_grid();
  std::vector<double> thetas{0.7, 0.9, 1.1};
  RandomSource r1(63, 0);
  auto smooth = smoothness_diagnostic(ResponseModel::noisy(0.3, kUnit), base, thetas, grid,
                                      0.02, 100000, r1);
  CHECK_FALSE(smooth.any_flagged);

  RandomSource r2(64, 0);
  auto ns = smoothness_diagnostic(ResponseModel::non_strategic(kUnit), base, thetas, grid,
                                  0.02, 100000, r2);
  CHECK_FALSE(ns.any_flagged);

  RandomSource r3(65, 0);
  auto mix = smoothness_diagnostic(
      ResponseModel::mixture(0.5, ResponseModel::standard(kUnit)), base, thetas, grid,
      0.02, 100000, r3);
  CHECK(mix.any_flagged);
  for (const auto& [theta, tp] : mix.flags) {
    CHECK(std::abs(tp - theta) <= 0.02 + 0.005 + 1e-9);  // at the boundary atom
  }
}

TEST_CASE("wasserstein counterexample ratios blow up like 1/sqrt(eps)") {
  std::vector<double> eps{1.0, 1e-2, 1e-4};
  RandomSource rng(67, 0);
  auto pts = wasserstein_counterexample(eps, 100000, rng);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].ratio < 2.0);
  CHECK(pts[1].ratio >= 10.0);
  // Exact pushforward oracle: W1 = s - s^2/2 + eps (1 - s), s = sqrt(eps^2 + 2 eps).
  auto exact = [](double e) {
    double s = std::sqrt(e * e + 2.0 * e);
    return s - 0.5 * s * s + e * (1.0 - s);
  };
  CHECK(pts[1].w1 == doctest::Approx(exact(1e-2)).epsilon(0.05));
  CHECK(pts[2].w1 == doctest::Approx(exact(1e-4)).epsilon(0.05));
  CHECK(pts[2].ratio >= 5.0 * pts[1].ratio);
}
