#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace perfsim::num {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Standard normal pdf / cdf.
inline double phi(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double Phi(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

inline double gaussian_pdf(double x, double mean, double std) {
  return phi((x - mean) / std) / std;
}
inline double gaussian_cdf(double x, double mean, double std) {
  return Phi((x - mean) / std);
}

// Root of f on [lo, hi] by bisection. The bracket must satisfy
// sign(f(lo)) != sign(f(hi)); otherwise a domain_error is thrown.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::domain_error("bisect: root not bracketed");
  }
  double mid = lo;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Composite trapezoid on [a, b] with n points (n >= 2).
template <class F>
double trapezoid(F&& f, double a, double b, int n = 2001) {
  double h = (b - a) / (n - 1);
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n - 1; ++i) acc += f(a + i * h);
  return acc * h;
}

// Locale-independent shortest round-trip formatting (CSV/report emission).
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace perfsim::num
