// quadrature.hpp - 1-D adaptive Simpson and piecewise-constant integration.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace martlab {

namespace detail {

template <class Fn>
double simpson_step(Fn&& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class Fn>
double adaptive_simpson(Fn&& f, double a, double b, double tol = 1e-10,
                        int max_depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Exact integral over [lo, hi] of a function that is constant between
// consecutive breakpoints. Breakpoints outside the interval are ignored.
template <class Fn>
double piecewise_constant_integral(Fn&& f, std::vector<double> breakpoints,
                                   double lo = 0.0, double hi = 1.0) {
  breakpoints.push_back(lo);
  breakpoints.push_back(hi);
  std::sort(breakpoints.begin(), breakpoints.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = std::clamp(breakpoints[i], lo, hi);
    const double b = std::clamp(breakpoints[i + 1], lo, hi);
    if (b - a <= 0.0) continue;
    acc += (b - a) * f(0.5 * (a + b));
  }
  return acc;
}

}  // namespace martlab
