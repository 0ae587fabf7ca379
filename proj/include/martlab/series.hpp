// series.hpp - scalar series utilities: polynomial-decay tail sums,
// iterated-logarithm helpers, slowly varying weight sequences and a
// convergence classifier for series of the form n^{-1} (log n)^a (loglog n)^b.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace martlab {

// log n clamped at 1 from below (used by weight sequences for small n).
inline double log_clamped(double n) { return std::max(1.0, std::log(n)); }

// Iterated logarithm log(log(max(e, n))); nonnegative for all n >= 1.
inline double loglog(double n) { return std::log(std::log(std::max(M_E, n))); }

// Iterated logarithm clamped at 1 from below.
inline double loglog_clamped(double n) { return std::max(1.0, loglog(n)); }

// Tail sum  sum_{k >= n} k^{-s}  for s > 1, via explicit summation up to a
// cutoff and an Euler-Maclaurin remainder (absolute error well below 1e-12).
inline double zeta_tail(double s, std::uint64_t n) {
  if (s <= 1.0) throw std::invalid_argument("zeta_tail: needs s > 1");
  if (n < 1) n = 1;
  const std::uint64_t cutoff = std::max<std::uint64_t>(n, 64) + 64;
  double head = 0.0;
  for (std::uint64_t k = n; k < cutoff; ++k) head += std::pow(static_cast<double>(k), -s);
  const double K = static_cast<double>(cutoff);
  const double rem = std::pow(K, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(K, -s) +
                     s / 12.0 * std::pow(K, -s - 1.0) -
                     s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(K, -s - 3.0);
  return head + rem;
}

// Nondecreasing positive weight sequence b_n = (log n)^alpha (loglog n)^beta
// with both log factors clamped at 1.
struct SlowlyVaryingSeq {
  double alpha = 0.0;
  double beta = 0.0;

  SlowlyVaryingSeq() = default;
  SlowlyVaryingSeq(double a, double b) : alpha(a), beta(b) {
    if (a < 0.0 || b < 0.0)
      throw std::invalid_argument("SlowlyVaryingSeq: exponents must be >= 0");
  }

  double operator()(std::uint64_t n) const {
    const double x = static_cast<double>(n);
    return std::pow(log_clamped(x), alpha) * std::pow(loglog_clamped(x), beta);
  }
};

// Partial sum  b_n^* = sum_{k=1}^n (k b_k)^{-1}.
inline double b_star(std::uint64_t n, const SlowlyVaryingSeq& b) {
  double s = 0.0;
  for (std::uint64_t k = 1; k <= n; ++k) s += 1.0 / (static_cast<double>(k) * b(k));
  return s;
}

// All values b_1^*, ..., b_n^* in one pass.
inline std::vector<double> b_star_prefix(std::uint64_t n, const SlowlyVaryingSeq& b) {
  std::vector<double> out(n);
  double s = 0.0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    s += 1.0 / (static_cast<double>(k) * b(k));
    out[k - 1] = s;
  }
  return out;
}

// Symbolic classification of  sum_n n^{-1} (log n)^a (loglog n)^b:
// converges iff a < -1, or a = -1 and b < -1 (integral test twice).
struct LogPowerSeries {
  double log_exp = 0.0;
  double loglog_exp = 0.0;

  bool converges() const {
    if (log_exp < -1.0) return true;
    if (log_exp > -1.0) return false;
    return loglog_exp < -1.0;
  }
};

}  // namespace martlab
