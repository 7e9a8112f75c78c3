#pragma once

#include <cmath>
#include <vector>

#include "perfsim/interval.hpp"

namespace perfsim {

// f_theta(x) = 1{x >= theta}.
struct ThresholdClassifier {
  double theta = 0.0;
  bool accepts(double x) const { return x >= theta; }
  int operator()(double x) const { return x >= theta ? 1 : 0; }
};

inline constexpr Interval kDefaultThetaRange{-0.5, 2.5};
inline constexpr double kDefaultThetaStep = 0.005;

// Inclusive uniform grid over [lo, hi]; the number of points is derived from
// the step so that grids are identical across call sites.
inline std::vector<double> make_theta_grid(double lo, double hi, double step) {
  int n = static_cast<int>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo + i * step;
  grid.back() = hi;
  return grid;
}

inline std::vector<double> default_theta_grid() {
  return make_theta_grid(kDefaultThetaRange.lo, kDefaultThetaRange.hi, kDefaultThetaStep);
}

}  // namespace perfsim
