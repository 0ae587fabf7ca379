#include <gtest/gtest.h>

#include <martlab/limits/averaged.hpp>
#include <martlab/limits/decay.hpp>
#include <martlab/limits/lil.hpp>
#include <martlab/limits/quenched.hpp>

#include <cmath>

namespace {

using namespace martlab;
using namespace martlab::models;
using namespace martlab::limits;

FiniteMarkovChain two_state() {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.9, 0.1}, {0.2, 0.8}};
  spec.observable = Eigen::VectorXd{{1.0, -1.0}};
  return FiniteMarkovChain(spec);
}

FiniteMarkovChain iid_row() {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.5}, {0.5, 0.5}};
  spec.observable = Eigen::VectorXd{{1.0, -1.0}};
  return FiniteMarkovChain(spec);
}

FiniteMarkovChain zero_chain() {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.9, 0.1}, {0.2, 0.8}};
  spec.observable = Eigen::VectorXd{{0.0, 0.0}};
  return FiniteMarkovChain(spec);
}

BernoulliShift doubling_identity() {
  BernoulliShiftSpec spec;
  spec.observable = PolynomialObservable{Poly({-0.5, 1.0})};
  return BernoulliShift(std::move(spec));
}

TEST(ExactQuenchedLaw, MassAndMeanInvariants) {
  const auto chain = two_state();
  for (int start : {0, 1}) {
    for (int n : {16, 256, 1024}) {
      const auto law = exact_quenched_law_two_state(chain, start, n);
      EXPECT_NEAR(law.total_mass, 1.0, 1e-6);
      const double exact_mean =
          chain.cond_exp_partial_sum(Start::at_state(start), n) /
          std::sqrt(static_cast<double>(n));
      EXPECT_NEAR(law.mean, exact_mean, 1e-8);
    }
  }
}

TEST(ExactQuenchedLaw, MatchesMonteCarloKS) {
  const auto chain = two_state();
  const double sigma = chain.sigma_exact();
  const int n = 512;
  const auto exact = exact_quenched_ks_two_state(chain, 0, n, sigma);
  const auto mc = quenched_cdf_distance(chain, Start::at_state(0), n, 40000, sigma, 5);
  // the Monte Carlo KS approaches the exact KS within sampling noise
  EXPECT_NEAR(mc.ks, exact.ks, 0.012);
}

TEST(ExactQuenchedLaw, RejectsLargerChains) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}};
  spec.observable = Eigen::VectorXd{{1.0, 0.0, -1.0}};
  const FiniteMarkovChain chain(spec);
  EXPECT_THROW(exact_quenched_law_two_state(chain, 0, 16), CapabilityError);
}

TEST(QuenchedCdf, KSShrinksWithN) {
  const auto chain = two_state();
  const double sigma = chain.sigma_exact();
  double prev = 1.0;
  for (int n : {1 << 8, 1 << 10, 1 << 12}) {
    const auto res = exact_quenched_ks_two_state(chain, 0, n, sigma);
    EXPECT_LT(res.ks, prev + 0.01);  // allow tiny inversions, require trend
    prev = res.ks;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(QuenchedCdf, ZeroObservableIsPointMass) {
  const auto chain = zero_chain();
  const auto res = quenched_cdf_distance(chain, Start::at_state(0), 64, 2000, 0.0, 3);
  EXPECT_TRUE(res.degenerate);
  EXPECT_NEAR(res.ks, 0.0, 1e-12);
}

TEST(QuenchedCdf, DoublingMapAgainstNormal) {
  const auto shift = doubling_identity();
  const auto res =
      quenched_cdf_distance(shift, Start::at_value(0.3), 1 << 10, 20000, 0.5, 11);
  EXPECT_LT(res.ks, 0.05);
}

TEST(Fclt, TerminalFunctionalReducesToCdfDistance) {
  const auto chain = two_state();
  const double sigma = chain.sigma_exact();
  const auto a = quenched_cdf_distance(chain, Start::at_state(0), 256, 5000, sigma, 21);
  const auto b = fclt_functional_check(chain, Start::at_state(0), 256,
                                       PathFunctional::Terminal, 5000, sigma, 21);
  EXPECT_NEAR(a.ks, b.ks, 1e-12);  // same seed, same statistic
}

TEST(Fclt, IntegralFunctionalAgainstNormalThird) {
  const auto chain = two_state();
  const double sigma = chain.sigma_exact();
  const auto res = fclt_functional_check(chain, Start::at_state(0), 1 << 12,
                                         PathFunctional::Integral, 20000, sigma, 23);
  EXPECT_LT(res.ks, 0.07);
}

TEST(Fclt, SupFunctionalsOnDoublingMap) {
  const auto shift = doubling_identity();
  const auto sup = fclt_functional_check(shift, Start::at_value(0.3), 1 << 12,
                                         PathFunctional::Sup, 20000, 0.5, 25);
  EXPECT_LT(sup.ks, 0.07);
  const auto sup_abs = fclt_functional_check(shift, Start::at_value(0.3), 1 << 12,
                                             PathFunctional::SupAbs, 20000, 0.5, 27);
  EXPECT_LT(sup_abs.ks, 0.07);
}

TEST(AveragedWeights, ConvergeToTwoThirds) {
  // direct deterministic summation; the limit is 4 int_0^1 (1-sqrt t)^2 dt
  EXPECT_NEAR(averaged_weight_sum(1 << 14), 2.0 / 3.0, 0.01 * 2.0 / 3.0);
  // frozen value from the summation oracle
  EXPECT_NEAR(averaged_weight_sum(1 << 14), 0.6667069657, 1e-9);
  const double err_small = std::abs(averaged_weight_sum(1 << 6) - 2.0 / 3.0);
  const double err_large = std::abs(averaged_weight_sum(1 << 12) - 2.0 / 3.0);
  EXPECT_LT(err_large, err_small);
}

TEST(AveragedClt, IidRowVarianceMatches) {
  const auto chain = iid_row();
  const double sigma = chain.sigma_exact();  // = ||f|| = 1
  const auto res = averaged_clt_check(chain, Start::at_state(0), 1 << 10, 20000,
                                      sigma, 31);
  EXPECT_NEAR(res.variance_ratio, 1.0, 0.05);
  EXPECT_LT(res.ks, 0.05);
}

TEST(AveragedClt, ZeroObservableIsIdenticallyZero) {
  const auto chain = zero_chain();
  const auto res = averaged_clt_check(chain, Start::at_state(0), 256, 2000, 0.0, 33);
  EXPECT_NEAR(res.variance, 0.0, 1e-18);
  EXPECT_NEAR(res.mean, 0.0, 1e-12);
}

TEST(Lil, ZeroObservableTraceIsZero) {
  const auto chain = zero_chain();
  const auto trace = lil_trace(chain, Start::stationary(), 1,
                               dyadic_checkpoints(10, 16));
  for (const auto& cp : trace.checkpoints) EXPECT_DOUBLE_EQ(cp.statistic, 0.0);
  EXPECT_DOUBLE_EQ(trace.terminal_running_max_abs(), 0.0);
}

TEST(Lil, CheckpointsValidated) {
  const auto chain = iid_row();
  EXPECT_THROW(lil_trace(chain, Start::stationary(), 1, {64, 64}),
               std::invalid_argument);
  EXPECT_THROW(lil_trace(chain, Start::stationary(), 1, {}), std::invalid_argument);
}

TEST(Lil, IidSignsDiagnosticWindowAtModerateHorizon) {
  // at n = 2^22 the running max of |S_n|/sqrt(2 n loglog n) for +-1 signs
  // sits inside the documented diagnostic window
  const auto chain = iid_row();
  const auto trace = lil_trace(chain, Start::stationary(), 2024,
                               dyadic_checkpoints(12, 22));
  const double sigma = chain.sigma_exact();
  const double m = trace.terminal_running_max_abs();
  EXPECT_GE(m, 0.6 * sigma);
  EXPECT_LE(m, 1.2 * sigma);
  // running extremes are monotone along checkpoints
  for (std::size_t i = 1; i < trace.checkpoints.size(); ++i) {
    EXPECT_GE(trace.checkpoints[i].running_max + 1e-15,
              trace.checkpoints[i - 1].running_max);
    EXPECT_LE(trace.checkpoints[i].running_min - 1e-15,
              trace.checkpoints[i - 1].running_min);
  }
}

TEST(RestDecay, IidRowRootN) {
  const auto chain = iid_row();
  DecayOptions opt;
  opt.n_paths = 200;
  const auto rep = rest_decay_diag(chain, DecayMode::RootN,
                                   {16, 64, 256, 1024, 4096}, opt);
  EXPECT_TRUE(rep.passes);
  EXPECT_GE(rep.pass_fraction, 0.95);
  // mean |rest|/sqrt(n) decays across checkpoints
  EXPECT_LT(rep.mean_abs.back(), rep.mean_abs.front());
}

TEST(RestDecay, DoublingAveragedMode) {
  const auto shift = doubling_identity();
  DecayOptions opt;
  opt.n_paths = 200;
  const auto rep = rest_decay_diag(shift, DecayMode::Averaged,
                                   {16, 64, 256, 1024, 4096}, opt);
  EXPECT_TRUE(rep.passes);
}

TEST(RestDecay, ZeroObservableTrivially) {
  const auto chain = zero_chain();
  DecayOptions opt;
  opt.n_paths = 50;
  const auto rep = rest_decay_diag(chain, DecayMode::RootN, {16, 64, 256, 1024}, opt);
  // statistic identically zero: envelope comparison is 0 < 0, so no path
  // "decays" strictly; the mean trace must be exactly zero
  for (double v : rep.mean_abs) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(CunyCheck, DoublingWithLogWeights) {
  const auto shift = doubling_identity();
  // rest = 2(X_0 - X_n) is bounded by 4/sqrt(12) in L2
  const auto rest_tail = projective::NormTail::bounded(4.0 / std::sqrt(12.0));
  DecayOptions opt;
  opt.n_paths = 200;
  const auto res = cuny_normalization_check(shift, SlowlyVaryingSeq(1.0, 0.0),
                                            {16, 64, 256, 1024, 4096}, rest_tail, opt);
  EXPECT_TRUE(res.premise_holds);
  EXPECT_TRUE(std::isfinite(res.premise_tail_bound));
  EXPECT_TRUE(res.decay.passes);
}

TEST(CunyCheck, PremiseFailureIsFlagged) {
  const auto chain = iid_row();
  const auto res = cuny_normalization_check(chain, SlowlyVaryingSeq(0.0, 0.0),
                                            {16, 64, 256, 1024},
                                            projective::NormTail::none());
  EXPECT_FALSE(res.premise_holds);
  EXPECT_NE(res.note.find("premise_failed"), std::string::npos);
}

TEST(CunyCheck, IidRowHarmonicWeights) {
  const auto chain = iid_row();
  const double fnorm = chain.lp_norm(chain.observable());
  const auto rest_tail = projective::NormTail::bounded(std::sqrt(2.0) * fnorm);
  DecayOptions opt;
  opt.n_paths = 200;
  const auto res = cuny_normalization_check(chain, SlowlyVaryingSeq(0.0, 0.0),
                                            {16, 64, 256, 1024, 4096}, rest_tail, opt);
  EXPECT_TRUE(res.premise_holds);
  EXPECT_TRUE(res.decay.passes);
}

}  // namespace
