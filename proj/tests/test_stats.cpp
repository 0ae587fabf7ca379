#include <gtest/gtest.h>

#include <martlab/rng.hpp>
#include <martlab/stats.hpp>

#include <vector>

namespace {

using namespace martlab;

TEST(NormalCdf, ReferenceValues) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.96), 0.024997895148220435, 1e-12);
  EXPECT_NEAR(normal_cdf(2.0, 2.0), normal_cdf(1.0), 1e-15);
}

TEST(KsDistance, UniformSampleAgainstItsCdf) {
  // A deterministic equispaced "sample" has KS distance 1/(2n) + o(1)
  // against the uniform CDF when placed at cell midpoints.
  const int n = 1000;
  std::vector<double> sample(n);
  for (int i = 0; i < n; ++i) sample[i] = (i + 0.5) / n;
  const double d = ks_distance(sample, [](double x) { return x; });
  EXPECT_NEAR(d, 0.5 / n, 1e-12);
}

TEST(KsDistance, DetectsShift) {
  std::vector<double> sample(1000);
  for (int i = 0; i < 1000; ++i) sample[i] = (i + 0.5) / 1000 * 0.5;  // squeezed
  const double d = ks_distance(sample, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_GT(d, 0.45);
}

TEST(KsDistanceAtoms, MatchesHandComputedValue) {
  // Two-atom law {0: 1/2, 1: 1/2} against uniform on [0,1]:
  // at x=0 the gap is 1/2 (cdf jumps 0 -> 1/2, reference 0);
  // at x=1 left limit 1/2 vs reference 1 gives 1/2.
  std::vector<std::pair<double, double>> atoms = {{0.0, 0.5}, {1.0, 0.5}};
  const double d =
      ks_distance_atoms(atoms, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(d, 0.5, 1e-15);
}

TEST(KsDistanceAtoms, ExactNormalAtomsAreClose) {
  // Discretize the standard normal on a fine grid; the atomized law must be
  // KS-close to the smooth reference at the grid resolution.
  std::vector<std::pair<double, double>> atoms;
  const int m = 4000;
  double prev = 0.0;
  for (int i = 1; i <= m; ++i) {
    const double x = -6.0 + 12.0 * i / m;
    const double c = normal_cdf(x);
    atoms.push_back({x, c - prev});
    prev = c;
  }
  atoms.push_back({6.1, 1.0 - prev});
  const double d = ks_distance_atoms(atoms, [](double x) { return normal_cdf(x); });
  EXPECT_LT(d, 2e-3);
}

TEST(BrownianLaws, SupAbsSeriesAgainstMonteCarlo) {
  // Monte Carlo check of the series CDF for sup|B| at a few quantiles.
  RngStream rs(123, 0);
  const int n_paths = 20000;
  const int steps = 2048;
  std::vector<double> sups;
  sups.reserve(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    double w = 0.0, m = 0.0;
    for (int i = 0; i < steps; ++i) {
      w += rs.next_normal() / std::sqrt(static_cast<double>(steps));
      m = std::max(m, std::abs(w));
    }
    sups.push_back(m);
  }
  const double d = ks_distance(sups, [](double x) { return brownian_sup_abs_cdf(x, 1.0); });
  // discretization bias of the running max is O(steps^-1/2)
  EXPECT_LT(d, 0.03);
}

TEST(BrownianLaws, SupOneSidedHalfNormal) {
  EXPECT_NEAR(brownian_sup_cdf(0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(brownian_sup_cdf(1.96, 1.0), 2 * normal_cdf(1.96) - 1, 1e-15);
  EXPECT_NEAR(brownian_sup_cdf(1.0, 0.5), brownian_sup_cdf(2.0, 1.0), 1e-15);
}

TEST(RunningStats, AgainstClosedForm) {
  RunningStats st;
  for (int i = 1; i <= 5; ++i) st.add(i);
  EXPECT_DOUBLE_EQ(st.mean(), 3.0);
  EXPECT_DOUBLE_EQ(st.variance(), 2.5);
  EXPECT_EQ(st.count(), 5u);
}

}  // namespace
