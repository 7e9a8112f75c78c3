#pragma once

#include <algorithm>

namespace perfsim {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return std::min(std::max(x, lo), hi); }
  double midpoint() const { return 0.5 * (lo + hi); }
};

}  // namespace perfsim
