// stats.hpp - distribution functions, Kolmogorov-Smirnov distances and
// running-moment accumulators used throughout the verification suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace martlab {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

inline double normal_cdf(double x, double sigma) {
  if (sigma <= 0.0) return x < 0.0 ? 0.0 : 1.0;  // point mass at 0
  return normal_cdf(x / sigma);
}

// CDF of sup_{0<=t<=1} B(t) for standard Brownian motion, scaled by sigma
// (reflection principle).
inline double brownian_sup_cdf(double x, double sigma) {
  if (x < 0.0) return 0.0;
  if (sigma <= 0.0) return 1.0;
  return 2.0 * normal_cdf(x / sigma) - 1.0;
}

// CDF of sup_{0<=t<=1} |B(t)|, sigma-scaled, via the alternating series
// P(sup|B| <= z) = (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2/(8 z^2)).
inline double brownian_sup_abs_cdf(double x, double sigma, int max_terms = 1000) {
  if (x <= 0.0) return 0.0;
  if (sigma <= 0.0) return 1.0;
  const double z = x / sigma;
  double sum = 0.0;
  for (int k = 0; k < max_terms; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double term = std::exp(-odd * odd * M_PI * M_PI / (8.0 * z * z)) / odd;
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(4.0 / M_PI * sum, 0.0, 1.0);
}

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

// KS distance between a sample and the point mass at `at` (the degenerate
// reference needs left limits, so the continuous-CDF formula does not apply).
inline double ks_distance_to_point_mass(const std::vector<double>& sample,
                                        double at = 0.0) {
  if (sample.empty())
    throw std::invalid_argument("ks_distance_to_point_mass: empty sample");
  std::size_t below = 0, above = 0;
  for (double x : sample) {
    below += x < at;
    above += x > at;
  }
  const double n = static_cast<double>(sample.size());
  return std::max(below / n, above / n);
}

// KS distance between a discrete law (atoms with probabilities) and a
// reference CDF; the atoms need not be sorted.
inline double ks_distance_atoms(std::vector<std::pair<double, double>> atoms,
                                const std::function<double(double)>& cdf) {
  if (atoms.empty()) throw std::invalid_argument("ks_distance_atoms: no atoms");
  std::sort(atoms.begin(), atoms.end());
  double d = 0.0;
  double acc = 0.0;
  for (const auto& [x, p] : atoms) {
    const double f = cdf(x);
    d = std::max(d, std::abs(acc - f));  // left limit
    acc += p;
    d = std::max(d, std::abs(acc - f));
  }
  return d;
}

// Streaming mean / variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_of_mean() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace martlab
