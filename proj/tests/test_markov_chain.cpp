#include <gtest/gtest.h>

#include <martlab/models/markov_chain.hpp>
#include <martlab/stats.hpp>

#include <vector>

namespace {

using namespace martlab;
using namespace martlab::models;

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

// independent dense matrix-power oracle (no Eigen)
std::vector<double> apply_power(const std::vector<std::vector<double>>& q,
                                std::vector<double> v, int n) {
  const int s = static_cast<int>(v.size());
  for (int rep = 0; rep < n; ++rep) {
    std::vector<double> w(s, 0.0);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) w[i] += q[i][j] * v[j];
    v = w;
  }
  return v;
}

TEST(MarkovChain, StationaryLawAndCentering) {
  const auto chain = two_state();
  EXPECT_NEAR(chain.stationary_law()(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(chain.stationary_law()(1), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(chain.stationary_law().dot(chain.observable()), 0.0, 1e-12);
  // centered observable: (1,-1) - 1/3 = (2/3, -4/3)
  EXPECT_NEAR(chain.observable()(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(chain.observable()(1), -4.0 / 3.0, 1e-12);
}

TEST(MarkovChain, IdentityChainGivesConstantPath) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{1.0, 0.0}, {0.0, 1.0}};
  spec.observable = Eigen::VectorXd{{3.0, -1.0}};
  spec.stationary = Eigen::VectorXd{{0.25, 0.75}};
  const FiniteMarkovChain chain(spec);
  RngStream rs(1, 0);
  const auto path = chain.sample_path(rs, 16, Start::at_state(0));
  for (double v : path.x) EXPECT_DOUBLE_EQ(v, path.x[0]);
  const auto path1 = chain.sample_path(rs, 16, Start::at_state(1));
  for (double v : path1.x) EXPECT_DOUBLE_EQ(v, path1.x[0]);
  EXPECT_NE(path.x[0], path1.x[0]);
}

TEST(MarkovChain, IidRowConditionalSumsCollapse) {
  const auto chain = iid_row();
  for (int k : {1, 2, 5, 32}) {
    EXPECT_NEAR(chain.cond_exp_partial_sum(Start::at_state(0), k),
                chain.observable()(0), 1e-13);
    EXPECT_NEAR(chain.cond_exp_partial_sum(Start::at_state(1), k),
                chain.observable()(1), 1e-13);
  }
}

TEST(MarkovChain, ConditionalSumsAgainstMatrixPowerOracle) {
  const auto chain = two_state();
  const std::vector<std::vector<double>> q = {{0.9, 0.1}, {0.2, 0.8}};
  const std::vector<double> f = {chain.observable()(0), chain.observable()(1)};
  for (int k : {1, 2, 3, 8, 17}) {
    // oracle: E(S_k | x) = sum_{i<k} (Q^i f)(x)
    std::vector<double> acc = {0.0, 0.0};
    for (int i = 0; i < k; ++i) {
      const auto qif = apply_power(q, f, i);
      acc[0] += qif[0];
      acc[1] += qif[1];
    }
    EXPECT_NEAR(chain.cond_exp_partial_sum(Start::at_state(0), k), acc[0], 1e-11);
    EXPECT_NEAR(chain.cond_exp_partial_sum(Start::at_state(1), k), acc[1], 1e-11);
  }
}

TEST(MarkovChain, ConditionalSumOracleAgreesWithQuenchedMonteCarlo) {
  const auto chain = two_state();
  for (int k : {1, 2, 8, 32}) {
    RunningStats st;
    for (int p = 0; p < 100000; ++p) {
      RngStream rs(99, p);
      st.add(chain.sample_partial_sum(rs, 0, k));
    }
    const double exact = chain.cond_exp_partial_sum(Start::at_state(0), k);
    EXPECT_NEAR(st.mean(), exact, 4.0 * st.stderr_of_mean())
        << "k = " << k;
  }
}

TEST(MarkovChain, PoissonSolutionSolvesTheEquation) {
  const auto chain = two_state();
  const auto& h = chain.poisson_solution();
  const Eigen::VectorXd resid =
      h - chain.transition() * h - chain.observable();
  EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(chain.stationary_law().dot(h), 0.0, 1e-12);
  // f is the 0.7-eigenvector of this chain, so h = f / 0.3
  EXPECT_NEAR(h(0), chain.observable()(0) / 0.3, 1e-10);
}

TEST(MarkovChain, SigmaMatchesLongRunVariance) {
  const auto chain = two_state();
  const double sigma2 = chain.sigma_exact() * chain.sigma_exact();
  EXPECT_NEAR(sigma2, 136.0 / 27.0, 1e-10);  // exact long-run variance
  // Var(S_n)/n converges to sigma^2 at geometric-mixing speed
  EXPECT_NEAR(chain.partial_sum_variance(4096) / 4096.0, sigma2, 1e-2);
  // iid rows: sigma = ||f||
  const auto iid = iid_row();
  EXPECT_NEAR(iid.sigma_exact(), iid.lp_norm(iid.observable()), 1e-13);
}

TEST(MarkovChain, PathFunctionalSecondMomentAgainstEnumeration) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.3, 0.2, 0.5}};
  spec.observable = Eigen::VectorXd{{1.0, 0.0, -1.0}};
  const FiniteMarkovChain chain(spec);
  const Eigen::VectorXd a{{0.3, -0.7, 1.1}};
  const Eigen::VectorXd c{{0.2, 0.4, -0.5}};
  const Eigen::VectorXd b{{-1.0, 0.6, 0.1}};
  const int n = 6;

  // enumerate all 3^(n+1) trajectories
  double brute = 0.0;
  const auto& q = chain.transition();
  const auto& pi = chain.stationary_law();
  std::vector<int> states(n + 1, 0);
  const int total = static_cast<int>(std::pow(3, n + 1));
  for (int code = 0; code < total; ++code) {
    int cc = code;
    for (int i = 0; i <= n; ++i) {
      states[i] = cc % 3;
      cc /= 3;
    }
    double prob = pi(states[0]);
    for (int i = 0; i < n; ++i) prob *= q(states[i], states[i + 1]);
    if (prob == 0.0) continue;
    double v = a(states[0]) + b(states[n]);
    for (int i = 0; i < n; ++i) v += c(states[i]);
    brute += prob * v * v;
  }

  const double dp =
      chain.path_functional_second_moment(a, c, b, n, Start::stationary());
  EXPECT_NEAR(dp, brute, 1e-12);
}

TEST(MarkovChain, RestNormMatchesTwoPointFormulaForLimitWindow) {
  const auto chain = two_state();
  const auto& h = chain.poisson_solution();
  for (int n : {1, 4, 16, 64}) {
    const double via_dp = chain.rest_norm_exact(n, FiniteMarkovChain::kLimitWindow);
    const double via_two_point = std::sqrt(
        chain.stationary_two_point_moment(h, n, [](double d) { return d * d; }));
    EXPECT_NEAR(via_dp, via_two_point, 1e-12);
  }
}

TEST(MarkovChain, AdaptednessPathPrefixDeterminesXk) {
  const auto chain = two_state();
  RngStream rs(5, 7);
  const auto path = chain.sample_path(rs, 64, Start::at_state(1));
  // X_k is a function of the state at k, which the complete driver record
  // exposes; recomputing from the prefix must reproduce it exactly.
  for (int k = 0; k < 64; ++k)
    EXPECT_DOUBLE_EQ(path.x[k], chain.observable()(path.states[k]));
}

TEST(MarkovChain, StationaryStartMeanWithinFourStandardErrors) {
  const auto chain = two_state();
  RunningStats st;
  for (int i = 0; i < 1000000; ++i) {
    RngStream rs(17, i);
    const auto a = chain.draw_stationary_anchor(rs);
    st.add(chain.observable()(a));
  }
  EXPECT_NEAR(st.mean(), 0.0, 4.0 * st.stderr_of_mean());
}

TEST(NormalOperator, ReversibleChainsAreNormal) {
  // detailed balance: pi_i q_ij = pi_j q_ji for a birth-death chain
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.7, 0.3, 0.0}, {0.15, 0.55, 0.3}, {0.0, 0.3, 0.7}};
  spec.observable = Eigen::VectorXd{{1.0, 0.0, -1.0}};
  const FiniteMarkovChain chain(spec);
  const auto res = normal_operator_check(chain);
  EXPECT_TRUE(res.is_normal);
  EXPECT_LT(res.residual, 1e-12);
}

TEST(NormalOperator, DoublyStochasticCirculantIsNormal) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}};
  spec.observable = Eigen::VectorXd{{1.0, 0.0, -1.0}};
  const FiniteMarkovChain chain(spec);
  EXPECT_TRUE(normal_operator_check(chain).is_normal);
}

TEST(NormalOperator, ResidualMatchesDirectMultiply) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.3, 0.2, 0.5}};
  spec.observable = Eigen::VectorXd{{1.0, 0.0, -1.0}};
  const FiniteMarkovChain chain(spec);
  const auto res = normal_operator_check(chain);

  // direct multiply with hand-rolled loops
  const auto& q = chain.transition();
  const auto& pi = chain.stationary_law();
  double max_abs = 0.0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      double qqs = 0.0, qsq = 0.0;
      for (int z = 0; z < 3; ++z) {
        qqs += q(x, z) * pi(y) * q(y, z) / pi(z);
        qsq += pi(z) * q(z, x) / pi(x) * q(z, y);
      }
      max_abs = std::max(max_abs, std::abs(qqs - qsq));
    }
  EXPECT_NEAR(res.residual, max_abs, 1e-13);
  EXPECT_FALSE(res.is_normal);  // this chain is genuinely non-normal
}

TEST(MarkovChain, InvalidInputsAreRejected) {
  FiniteMarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd{{0.9, 0.2}, {0.2, 0.8}};  // row sums 1.1
  spec.observable = Eigen::VectorXd{{1.0, -1.0}};
  EXPECT_THROW(FiniteMarkovChain{spec}, std::invalid_argument);

  const auto chain = two_state();
  RngStream rs(0, 0);
  EXPECT_THROW(chain.sample_path(rs, 0, Start::stationary()), std::invalid_argument);
  EXPECT_THROW(chain.sample_path(rs, 4, Start::at_state(7)), std::domain_error);
}

}  // namespace
