#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "perfsim/classifier.hpp"
#include "perfsim/cost.hpp"
#include "perfsim/distribution.hpp"
#include "perfsim/numerics.hpp"
#include "perfsim/random.hpp"

using namespace perfsim;

TEST_CASE("RandomSource: identical (seed, stream) yields identical sequences") {
  RandomSource a(123, 5);
  RandomSource b(123, 5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("RandomSource: golden-seed regression") {
  // Pinned outputs; a change here is a reproducibility break.
  RandomSource r(42, 0);
  CHECK(r.next_u64() == 1314570662435299988ULL);
  CHECK(r.next_u64() == 302103690806613372ULL);
  CHECK(r.next_u64() == 18231265443818652859ULL);
  RandomSource u(42, 0);
  CHECK(u.uniform01() == doctest::Approx(0.071263018404903011).epsilon(1e-15));
  RandomSource n(42, 0);
  CHECK(n.normal() == doctest::Approx(2.2862669317888455).epsilon(1e-12));
  CHECK(n.normal() == doctest::Approx(0.23609117041201549).epsilon(1e-12));
}

TEST_CASE("RandomSource: distinct streams are distinct, splits are stable") {
  RandomSource a(9, 0);
  RandomSource b(9, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64() ? 1 : 0;
  CHECK(same == 0);
  RandomSource parent(9, 3);
  CHECK(parent.split(2).next_u64() == parent.split(2).next_u64());
  CHECK(parent.split(2).next_u64() != parent.split(3).next_u64());
}

TEST_CASE("RandomSource: moments") {
  RandomSource r(1, 0);
  const int n = 100000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  int heads = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    double z = r.normal();
    sn += z;
    sn2 += z * z;
    heads += r.bernoulli(0.3) ? 1 : 0;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sn / n == doctest::Approx(0.0).scale(1).epsilon(0.015));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(heads / static_cast<double>(n) == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("BaseDistribution: construction guards") {
  std::vector<Component> bad_weights{{0, 0.5, ComponentKind::kGaussian, 0.0, 0.3},
                                     {1, 0.6, ComponentKind::kGaussian, 1.0, 0.3}};
  CHECK_THROWS_AS(BaseDistribution(bad_weights, Interval{-5, 6}), std::invalid_argument);
  // Mass outside a too-narrow support.
  std::vector<Component> wide{{0, 0.5, ComponentKind::kGaussian, 0.0, 1.0},
                              {1, 0.5, ComponentKind::kGaussian, 1.0, 1.0}};
  CHECK_THROWS_AS(BaseDistribution(wide, Interval{-1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(BaseDistribution({}, Interval{0, 1}), std::invalid_argument);
}

TEST_CASE("BaseDistribution: symmetric mixture pdf and posterior") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  CHECK(base.pdf(0.5, 0) == doctest::Approx(base.pdf(0.5, 1)).epsilon(1e-14));
  CHECK(base.posterior(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // Direct Gaussian-pdf arithmetic: mu(1) = 1 / (1 + exp(-4.5)).
  CHECK(base.posterior(1.0) == doctest::Approx(0.9890130573694067).epsilon(1e-10));
  CHECK_THROWS_AS(base.pdf(12.0, 0), std::domain_error);

  // Posterior within [0, 1] and strictly increasing on a grid.
  double prev = -1.0;
  for (double x = -2.0; x <= 3.0; x += 0.01) {
    double m = base.posterior(x);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    CHECK(m > prev);
    prev = m;
  }

  // Marginal integrates to one on the support.
  double total = num::trapezoid([&](double x) { return base.marginal_pdf(x); }, -5.0, 6.0,
                                4001);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("BaseDistribution: sampling statistics and determinism") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource rng(2024, 0);
  std::vector<double> xs;
  std::vector<int> ys;
  const int n = 100000;
  base.sample(n, rng, xs, ys);
  double ones = 0.0, mean = 0.0;
  for (int i = 0; i < n; ++i) {
    ones += ys[static_cast<std::size_t>(i)];
    mean += xs[static_cast<std::size_t>(i)];
  }
  ones /= n;
  mean /= n;
  CHECK(ones >= 0.4953);  // binomial 3-sigma band around 1/2
  CHECK(ones <= 0.5047);
  CHECK(mean == doctest::Approx(0.5).scale(1).epsilon(0.006));

  RandomSource r1(77, 0), r2(77, 0);
  auto p1 = base.sample_one(r1);
  auto p2 = base.sample_one(r2);
  CHECK(p1.first == p2.first);
  CHECK(p1.second == p2.second);
}

TEST_CASE("BaseDistribution: conditional sampling respects the label") {
  auto base = BaseDistribution::symmetric_gaussian_mixture();
  RandomSource rng(5, 0);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) mean += base.sample_conditional(1, rng);
  CHECK(mean / 20000 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("CostFunction: reach points") {
  auto unit = CostFunction::linear(1.0, 1.0);
  auto rp = unit.reach_points(0.5);
  CHECK(rp.lower == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(rp.upper == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(std::abs(unit(rp.lower, 0.5) - 1.0) <= 1e-10);
  CHECK(std::abs(unit(0.5, rp.upper) - 1.0) <= 1e-10);

  auto steep = CostFunction::linear(2.0, 1.0);
  auto rp2 = steep.reach_points(0.0);
  CHECK(rp2.lower == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(rp2.upper == doctest::Approx(0.5).epsilon(1e-10));

  auto sq = CostFunction::squared_difference(1.0);
  auto rp3 = sq.reach_points(1.0);
  CHECK(rp3.lower == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(rp3.upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(std::abs(sq(rp3.lower, 1.0) - 1.0) <= 1e-10);
  CHECK(std::abs(sq(1.0, rp3.upper) - 1.0) <= 1e-10);
}

TEST_CASE("CostFunction: validity checker") {
  RandomSource rng(11, 0);
  auto unit = CostFunction::linear(1.0, 1.0);
  CHECK(check_cost_validity([&](double a, double b) { return unit(a, b); },
                            Interval{-5, 6}, 2000, rng)
            .valid);
  auto sq = CostFunction::squared_difference(1.0);
  CHECK(check_cost_validity([&](double a, double b) { return sq(a, b); },
                            Interval{0.05, 3.0}, 2000, rng)
            .valid);
  auto zero = check_cost_validity([](double, double) { return 0.0; }, Interval{-1, 1},
                                  2000, rng);
  CHECK_FALSE(zero.valid);
  CHECK(!zero.reason.empty());
}

TEST_CASE("gaming_lower_bound clips at the support") {
  auto cost = CostFunction::linear(1.0, 1.0);
  auto base = BaseDistribution::uniform_unit();
  CHECK(gaming_lower_bound(cost, base.support(), 0.7) == doctest::Approx(0.0));
  auto wide = BaseDistribution::symmetric_gaussian_mixture();
  CHECK(gaming_lower_bound(cost, wide.support(), 0.7) == doctest::Approx(-0.3));
}

TEST_CASE("theta grid construction") {
  auto grid = default_theta_grid();
  CHECK(grid.size() == 601);
  CHECK(grid.front() == doctest::Approx(-0.5));
  CHECK(grid.back() == doctest::Approx(2.5));
  CHECK(grid[201] == doctest::Approx(0.505));
}
