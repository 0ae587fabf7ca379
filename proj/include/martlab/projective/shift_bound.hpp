// shift_bound.hpp - quadrature bound on shift forecast norms:
//   ||E(S_j|F_0)||^2  (one-based sums)  is dominated by
//   sum_{k=1}^j 2^k int int 1{|x-y| <= 2^{-k}} |g(x)-g(y)|^2 dy dx,
// evaluated by banded 2-D midpoint quadrature with resolution doubling.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/models/bernoulli_shift.hpp>

namespace martlab::projective {

struct ShiftBoundResult {
  double value = 0.0;              // the full bound for the requested j
  std::vector<double> terms;       // one banded integral per depth k = 1..j
  double relative_change = 0.0;    // last refinement step
  int resolution = 0;              // final outer resolution
};

namespace detail {

template <class G>
double banded_integral(G&& g, double delta, int res_x, int res_y) {
  double acc = 0.0;
  for (int i = 0; i < res_x; ++i) {
    const double x = (i + 0.5) / res_x;
    const double lo = std::max(0.0, x - delta);
    const double hi = std::min(1.0, x + delta);
    const double gx = g(x);
    double inner = 0.0;
    for (int jj = 0; jj < res_y; ++jj) {
      const double y = lo + (hi - lo) * (jj + 0.5) / res_y;
      const double d = gx - g(y);
      inner += d * d;
    }
    acc += inner * (hi - lo) / res_y;
  }
  return acc / res_x;
}

}  // namespace detail

inline ShiftBoundResult bernoulli_shift_bound(const models::BernoulliShift& model, int j,
                                              double rel_tol = 1e-4,
                                              int max_resolution = 1 << 14) {
  if (j < 1) throw std::invalid_argument("shift_bound: j >= 1");
  auto g = [&](double y) { return model.value(y); };

  ShiftBoundResult out;
  out.terms.assign(j, 0.0);
  double prev_total = -1.0;
  for (int res = 1 << 7; res <= max_resolution; res *= 2) {
    double total = 0.0;
    for (int k = 1; k <= j; ++k) {
      const double delta = std::pow(2.0, -k);
      const double term = std::pow(2.0, k) * detail::banded_integral(g, delta, res, 64);
      out.terms[k - 1] = term;
      total += term;
    }
    out.resolution = res;
    if (prev_total >= 0.0) {
      out.relative_change = std::abs(total - prev_total) / std::max(total, 1e-300);
      if (out.relative_change < rel_tol) {
        out.value = total;
        return out;
      }
    }
    prev_total = total;
  }
  throw std::runtime_error(
      "shift_bound: quadrature did not settle below the tolerance (last relative "
      "change " + std::to_string(out.relative_change) + " at resolution " +
      std::to_string(out.resolution) + ")");
}

}  // namespace martlab::projective
