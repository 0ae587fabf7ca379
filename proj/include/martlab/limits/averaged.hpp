// averaged.hpp - the averaged statistic (1/n) sum_{k<=n} S_k / sqrt(k): its
// deterministic weight identity and the distributional check against the
// normal law with variance (2/3) sigma^2.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <martlab/models/start.hpp>
#include <martlab/stats.hpp>

namespace martlab::limits {

// (1/n^2) sum_{i=0}^{n-1} (sum_{k=i+1}^n k^{-1/2})^2, which converges to
// 4 * int_0^1 (1 - sqrt(t))^2 dt = 2/3.
inline double averaged_weight_sum(int n) {
  std::vector<double> suffix(n + 2, 0.0);
  for (int k = n; k >= 1; --k)
    suffix[k] = suffix[k + 1] + 1.0 / std::sqrt(static_cast<double>(k));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += suffix[i + 1] * suffix[i + 1];
  return acc / (static_cast<double>(n) * n);
}

struct AveragedCltResult {
  double ks = 0.0;
  double variance = 0.0;        // empirical variance of the averaged statistic
  double variance_ratio = 0.0;  // against (2/3) sigma^2
  double mean = 0.0;
  int n = 0;
  int n_paths = 0;
  bool degenerate = false;
};

// Law of (1/n) sum_{k=1}^n S_k/sqrt(k) under a fixed start, against
// N(0, (2/3) sigma^2).
template <class Model>
AveragedCltResult averaged_clt_check(const Model& model, const models::Start& start,
                                     int n, int n_paths, double sigma,
                                     std::uint64_t seed, int threads = 1) {
  std::vector<double> samples(n_paths, 0.0);
  models::for_each_path(model, seed, n_paths, n, start, threads,
                        [&](int i, const auto& path) {
                          double s = 0.0, stat = 0.0;
                          for (int k = 1; k <= n; ++k) {
                            s += path.x[k - 1];
                            stat += s / std::sqrt(static_cast<double>(k));
                          }
                          samples[i] = stat / n;
                        });
  AveragedCltResult out;
  out.n = n;
  out.n_paths = n_paths;
  RunningStats st;
  for (double v : samples) st.add(v);
  out.mean = st.mean();
  out.variance = st.variance();
  const double limit_var = 2.0 / 3.0 * sigma * sigma;
  out.variance_ratio = limit_var > 0.0 ? out.variance / limit_var : 0.0;
  out.degenerate = sigma <= 0.0;
  const double ref_sigma = sigma * std::sqrt(2.0 / 3.0);
  out.ks = ks_distance(std::move(samples), [ref_sigma](double x) {
    return ref_sigma <= 0.0 ? (x < 0.0 ? 0.0 : 1.0) : normal_cdf(x, ref_sigma);
  });
  return out;
}

}  // namespace martlab::limits
