#include <gtest/gtest.h>

#include <martlab/series.hpp>

namespace {

using namespace martlab;

TEST(ZetaTail, AgainstBruteForce) {
  // brute-force oracle: explicit sum to 10^7 plus integral remainder
  auto brute = [](double s, std::uint64_t n) {
    double acc = 0.0;
    const std::uint64_t K = 10000000;
    for (std::uint64_t k = n; k < K; ++k) acc += std::pow(static_cast<double>(k), -s);
    acc += std::pow(static_cast<double>(K), 1.0 - s) / (s - 1.0) +
           0.5 * std::pow(static_cast<double>(K), -s);
    return acc;
  };
  EXPECT_NEAR(zeta_tail(1.5, 1), 2.612375348685488, 1e-10);  // zeta(3/2)
  EXPECT_NEAR(zeta_tail(1.5, 4), brute(1.5, 4), 1e-9);
  EXPECT_NEAR(zeta_tail(1.5, 4), 1.0663718683, 1e-8);
  EXPECT_NEAR(zeta_tail(2.0, 1), M_PI * M_PI / 6.0, 1e-10);
  EXPECT_NEAR(zeta_tail(2.5, 100), brute(2.5, 100), 1e-12);
}

TEST(Logs, ClampingConventions) {
  EXPECT_DOUBLE_EQ(log_clamped(1.0), 1.0);
  EXPECT_DOUBLE_EQ(log_clamped(std::exp(2.0)), 2.0);
  EXPECT_DOUBLE_EQ(loglog(1.0), 0.0);          // log(log(e))
  EXPECT_DOUBLE_EQ(loglog(2.0), 0.0);          // max(e, 2) = e
  EXPECT_NEAR(loglog(100.0), std::log(std::log(100.0)), 1e-15);
  EXPECT_DOUBLE_EQ(loglog_clamped(10.0), 1.0);   // loglog(10) ~ 0.834, clamped up
  EXPECT_NEAR(loglog_clamped(100.0), 1.5271796258079011, 1e-12);
}

TEST(SlowlyVarying, NondecreasingAndPositive) {
  const SlowlyVaryingSeq b(1.0, 1.5);
  double prev = 0.0;
  for (std::uint64_t n = 1; n <= 100000; n = n * 3 / 2 + 1) {
    const double v = b(n);
    EXPECT_GT(v, 0.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_DOUBLE_EQ(b(1), 1.0);  // fully clamped at small n
}

TEST(BStar, HarmonicClosedForm) {
  const SlowlyVaryingSeq one(0.0, 0.0);
  EXPECT_NEAR(b_star(4, one), 25.0 / 12.0, 1e-14);
  EXPECT_NEAR(b_star(1, one), 1.0, 1e-15);
}

TEST(BStar, DirectSummationForLogWeights) {
  const SlowlyVaryingSeq b(1.0, 0.0);  // b_n = max(1, log n)
  double direct = 0.0;
  for (std::uint64_t k = 1; k <= 10; ++k)
    direct += 1.0 / (static_cast<double>(k) * std::max(1.0, std::log(static_cast<double>(k))));
  EXPECT_NEAR(b_star(10, b), direct, 1e-14);

  const auto prefix = b_star_prefix(10, b);
  EXPECT_NEAR(prefix.back(), direct, 1e-14);
  for (std::size_t i = 1; i < prefix.size(); ++i) EXPECT_GT(prefix[i], prefix[i - 1]);
}

TEST(BStar, ConvergentWeightsStayBounded) {
  // b_n = (log n)(loglog n)^2 gives a summable series: partial sums level off.
  const SlowlyVaryingSeq b(1.0, 2.0);
  const double b1e4 = b_star(10000, b);
  const double b1e5 = b_star(100000, b);
  EXPECT_LT(b1e5 - b1e4, 0.05 * b1e4);
}

TEST(LogPowerSeries, Classification) {
  EXPECT_TRUE((LogPowerSeries{-2.0, 0.0}.converges()));
  EXPECT_TRUE((LogPowerSeries{-1.0, -1.5}.converges()));
  EXPECT_FALSE((LogPowerSeries{-1.0, -1.0}.converges()));
  EXPECT_FALSE((LogPowerSeries{-1.0, 5.0}.converges()));
  EXPECT_FALSE((LogPowerSeries{0.0, -10.0}.converges()));
  EXPECT_TRUE((LogPowerSeries{-1.1, 10.0}.converges()));
}

}  // namespace
