// markov_chain.hpp - stationary finite-state Markov chain with a centered
// observable. All conditional expectations are exact matrix computations,
// which makes this the reference model for every checker in the library.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/models/start.hpp>
#include <martlab/rng.hpp>

namespace martlab::models {

struct FiniteMarkovChainSpec {
  Eigen::MatrixXd transition;            // row-stochastic
  Eigen::VectorXd observable;            // centered internally
  std::optional<Eigen::VectorXd> stationary;  // computed if absent
};

struct NormalOperatorResult {
  bool is_normal = false;
  double residual = 0.0;
};

class FiniteMarkovChain {
 public:
  using Anchor = int;  // conditioning data at a time point: the state

  struct Path {
    std::vector<double> x;     // X_0..X_{H-1}
    std::vector<int> states;   // xi_0..xi_H (one extra step for differences)
  };

  explicit FiniteMarkovChain(const FiniteMarkovChainSpec& spec)
      : q_(spec.transition) {
    const auto n = q_.rows();
    if (n < 1 || q_.cols() != n)
      throw std::invalid_argument("chain: transition matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (q_(i, j) < 0.0) throw std::invalid_argument("chain: negative transition entry");
        row += q_(i, j);
      }
      if (std::abs(row - 1.0) > 1e-12)
        throw std::invalid_argument("chain: row " + std::to_string(i) +
                                    " does not sum to 1");
    }
    if (spec.observable.size() != n)
      throw std::invalid_argument("chain: observable size mismatch");

    pi_ = spec.stationary ? *spec.stationary : solve_stationary(q_);
    if (std::abs(pi_.sum() - 1.0) > 1e-10)
      throw std::invalid_argument("chain: stationary vector does not sum to 1");
    if (((pi_.transpose() * q_).transpose() - pi_).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("chain: stationary vector is not a left fixed point");

    f_ = spec.observable;
    f_.array() -= pi_.dot(f_);  // center under the stationary law

    // cumulative rows for sampling, stationary cdf
    cum_rows_.assign(n, std::vector<double>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) cum_rows_[i][j] = q_(i, j);
    probs_pi_.assign(pi_.data(), pi_.data() + n);

    // Poisson solution h = sum_j Q^j f via (I - Q + 1 pi^T) h = f; the rank-one
    // shift pins pi^T h = 0 for centered f.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - q_ +
                        Eigen::VectorXd::Ones(n) * pi_.transpose();
    h_ = a.partialPivLu().solve(f_);
    qh_ = q_ * h_;
    if ((h_ - qh_ - f_).cwiseAbs().maxCoeff() > 1e-9)
      throw std::runtime_error("chain: Poisson equation solve failed (slow mixing?)");
  }

  int n_states() const { return static_cast<int>(q_.rows()); }
  const Eigen::MatrixXd& transition() const { return q_; }
  const Eigen::VectorXd& stationary_law() const { return pi_; }
  const Eigen::VectorXd& observable() const { return f_; }
  const Eigen::VectorXd& poisson_solution() const { return h_; }

  // ----- norms under the stationary law -----

  double lp_norm(const Eigen::VectorXd& fn, double p = 2.0) const {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p >= 1 required");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < fn.size(); ++i)
      acc += pi_(i) * std::pow(std::abs(fn(i)), p);
    return std::pow(acc, 1.0 / p);
  }

  // e_n(x) = E(S_n | xi_0 = x) with S_n = X_0 + ... + X_{n-1}.
  Eigen::VectorXd cond_sum_fn(int n) const {
    if (n < 1) throw std::invalid_argument("cond_sum_fn: n >= 1");
    Eigen::VectorXd e = f_;
    for (int k = 1; k < n; ++k) e = f_ + (q_ * e).eval();
    return e;
  }

  // All of e_1..e_N in one sweep.
  std::vector<Eigen::VectorXd> cond_sum_table(int n_max) const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(n_max);
    Eigen::VectorXd e = f_;
    out.push_back(e);
    for (int k = 2; k <= n_max; ++k) {
      e = f_ + (q_ * e).eval();
      out.push_back(e);
    }
    return out;
  }

  double projective_norm_exact(int n, double p = 2.0) const {
    return lp_norm(cond_sum_fn(n), p);
  }

  // E(S_k | F_0) evaluated at a quenched start.
  double cond_exp_partial_sum(const Start& start, int k) const {
    require_quenched(start);
    return cond_sum_fn(k)(start.state);
  }

  // ----- sampling -----

  Path sample_path(RngStream& rs, int horizon, const Start& start) const {
    if (horizon < 1) throw std::invalid_argument("sample_path: horizon >= 1");
    Path p;
    p.x.resize(horizon);
    p.states.resize(horizon + 1);
    int s = start.kind == StartKind::Stationary ? rs.next_index(probs_pi_)
                                                : checked_state(start.state);
    for (int k = 0; k < horizon; ++k) {
      p.states[k] = s;
      p.x[k] = f_(s);
      s = rs.next_index(cum_rows_[s]);
    }
    p.states[horizon] = s;
    return p;
  }

  Anchor draw_stationary_anchor(RngStream& rs) const { return rs.next_index(probs_pi_); }

  // Streaming sampler for long single-path experiments (no materialized path).
  class Stepper {
   public:
    Stepper(const FiniteMarkovChain& chain, int state) : chain_(&chain), state_(state) {}
    double next(RngStream& rs) {
      const double x = chain_->f_(state_);
      state_ = rs.next_index(chain_->cum_rows_[state_]);
      return x;
    }

   private:
    const FiniteMarkovChain* chain_;
    int state_;
  };

  Stepper stepper(RngStream& rs, const Start& start) const {
    const int s = start.kind == StartKind::Stationary ? rs.next_index(probs_pi_)
                                                      : checked_state(start.state);
    return Stepper(*this, s);
  }

  // S_n sampled from a fixed start state (used by paired conditional
  // Monte Carlo estimators).
  double sample_partial_sum(RngStream& rs, Anchor a, int n) const {
    int s = checked_state(a);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      sum += f_(s);
      s = rs.next_index(cum_rows_[s]);
    }
    return sum;
  }

  // ----- coupling support -----

  static constexpr int kLimitWindow = 0;  // window value meaning the L2 limit

  // Per-state tables bound to one averaging window (or the limit martingale).
  struct CouplingKit {
    Eigen::VectorXd theta;        // theta^m per state
    Eigen::VectorXd theta_pred;   // (Q theta^m) per state
    Eigen::VectorXd y;            // one-step averaged forecast Y^m per state

    double theta_at(const Path& p, int k) const { return theta(p.states[k]); }
    double theta_pred_at(const Path& p, int k) const { return theta_pred(p.states[k]); }
    double y_at(const Path& p, int k) const { return y(p.states[k]); }
    double d_at(const Path& p, int k) const {
      return theta(p.states[k + 1]) - theta_pred(p.states[k]);
    }
  };

  // theta^m = sum_{j<m} (1 - j/m) Q^j f; window 0 requests the limit h.
  Eigen::VectorXd theta_fn(int m) const {
    if (m == kLimitWindow) return h_;
    if (m < 1) throw std::invalid_argument("theta_fn: window must be >= 1 or limit");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(q_.rows());
    Eigen::VectorXd qjf = f_;
    for (int j = 0; j < m; ++j) {
      acc += (1.0 - static_cast<double>(j) / m) * qjf;
      if (j + 1 < m) qjf = (q_ * qjf).eval();
    }
    return acc;
  }

  // Y^m = (1/m) sum_{j=1}^m Q^j f; zero for the limit martingale.
  Eigen::VectorXd y_fn(int m) const {
    if (m == kLimitWindow) return Eigen::VectorXd::Zero(q_.rows());
    if (m < 1) throw std::invalid_argument("y_fn: window must be >= 1 or limit");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(q_.rows());
    Eigen::VectorXd qjf = f_;
    for (int j = 1; j <= m; ++j) {
      qjf = (q_ * qjf).eval();
      acc += qjf;
    }
    return acc / static_cast<double>(m);
  }

  CouplingKit coupling_kit(int m) const {
    CouplingKit kit;
    kit.theta = theta_fn(m);
    kit.theta_pred = q_ * kit.theta;
    kit.y = y_fn(m);
    return kit;
  }

  bool has_limit_martingale() const { return true; }
  bool has_exact_second_moments() const { return true; }

  // sigma = ||D_0|| for the limit martingale, exact.
  double sigma_exact() const {
    return std::sqrt(lp_norm(h_) * lp_norm(h_) - lp_norm(qh_) * lp_norm(qh_));
  }

  // ||D^m||, exact: D^m(x, y) = theta^m(y) - (Q theta^m)(x).
  double d_norm_exact(int m) const { return transition_fn_norm(theta_fn(m)); }

  // ||D^{m2} - D^{m1}||, exact.
  double d_diff_norm_exact(int m1, int m2) const {
    return transition_fn_norm(theta_fn(m2) - theta_fn(m1));
  }

  // L2 norm of u(xi_1) - (Qu)(xi_0) under the stationary law.
  double transition_fn_norm(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd qu = q_ * u;
    double acc = 0.0;
    for (int x = 0; x < n_states(); ++x)
      for (int y = 0; y < n_states(); ++y) {
        const double d = u(y) - qu(x);
        acc += pi_(x) * q_(x, y) * d * d;
      }
    return std::sqrt(acc);
  }

  // lag-k autocovariance of the observable, exact.
  double autocovariance(int k) const {
    Eigen::VectorXd qkf = f_;
    for (int j = 0; j < k; ++j) qkf = (q_ * qkf).eval();
    double acc = 0.0;
    for (int x = 0; x < n_states(); ++x) acc += pi_(x) * f_(x) * qkf(x);
    return acc;
  }

  // Var_pi(S_n), exact.
  double partial_sum_variance(int n) const {
    double acc = static_cast<double>(n) * autocovariance(0);
    Eigen::VectorXd qkf = f_;
    for (int k = 1; k < n; ++k) {
      qkf = (q_ * qkf).eval();
      double gk = 0.0;
      for (int x = 0; x < n_states(); ++x) gk += pi_(x) * f_(x) * qkf(x);
      acc += 2.0 * static_cast<double>(n - k) * gk;
    }
    return acc;
  }

  // Exact second moment of  a(xi_0) + sum_{i=0}^{n-1} c(xi_i) + b(xi_n)
  // under a stationary or quenched start.
  double path_functional_second_moment(const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& c,
                                       const Eigen::VectorXd& b, int n,
                                       const Start& start) const {
    const int ns = n_states();
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(ns);
    if (start.kind == StartKind::Stationary) {
      mass = pi_;
    } else {
      mass(checked_state(start.state)) = 1.0;
    }
    Eigen::VectorXd m1(ns), m2(ns);
    for (int x = 0; x < ns; ++x) {
      const double v = a(x) + c(x);
      m1(x) = mass(x) * v;
      m2(x) = mass(x) * v * v;
    }
    for (int step = 1; step <= n; ++step) {
      Eigen::VectorXd nm(ns), n1(ns), n2(ns);
      nm.setZero();
      n1.setZero();
      n2.setZero();
      for (int x = 0; x < ns; ++x) {
        if (mass(x) == 0.0 && m1(x) == 0.0 && m2(x) == 0.0) continue;
        for (int y = 0; y < ns; ++y) {
          const double w = q_(x, y);
          if (w == 0.0) continue;
          const double add = step < n ? c(y) : b(y);
          nm(y) += w * mass(x);
          n1(y) += w * (m1(x) + add * mass(x));
          n2(y) += w * (m2(x) + 2.0 * add * m1(x) + add * add * mass(x));
        }
      }
      mass.swap(nm);
      m1.swap(n1);
      m2.swap(n2);
    }
    return m2.sum();
  }

  // ||S_n - M_n^m||_{L2(pi)}, exact, for a finite window or the limit.
  double rest_norm_exact(int n, int m) const {
    const Eigen::VectorXd theta = theta_fn(m);
    const Eigen::VectorXd y = y_fn(m);
    return std::sqrt(path_functional_second_moment(theta, y, -theta, n, Start::stationary()));
  }

  // E[phi(w(xi_0) - w(xi_n))] under the stationary law, exact.
  template <class Phi>
  double stationary_two_point_moment(const Eigen::VectorXd& w, int n, Phi&& phi) const {
    const Eigen::MatrixXd qn = matrix_power(n);
    double acc = 0.0;
    for (int x = 0; x < n_states(); ++x)
      for (int y = 0; y < n_states(); ++y)
        acc += pi_(x) * qn(x, y) * phi(w(x) - w(y));
    return acc;
  }

  Eigen::MatrixXd matrix_power(int n) const {
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(q_.rows(), q_.cols());
    Eigen::MatrixXd base = q_;
    while (n > 0) {
      if (n & 1) result = (result * base).eval();
      base = (base * base).eval();
      n >>= 1;
    }
    return result;
  }

  // Adjoint in L2(pi): Q*(x,y) = pi(y) Q(y,x) / pi(x).
  Eigen::MatrixXd adjoint() const {
    const int ns = n_states();
    Eigen::MatrixXd qs(ns, ns);
    for (int x = 0; x < ns; ++x) {
      if (pi_(x) <= 0.0)
        throw std::domain_error("adjoint: zero stationary mass at state " + std::to_string(x));
      for (int y = 0; y < ns; ++y) qs(x, y) = pi_(y) * q_(y, x) / pi_(x);
    }
    return qs;
  }

 private:
  static Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& q) {
    // left fixed point: solve (Q^T - I) pi = 0 with sum(pi) = 1 via a
    // bordered linear system
    const auto n = q.rows();
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = q.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.bottomRows(1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i)
      if (pi(i) < -1e-12) throw std::runtime_error("chain: negative stationary mass");
    return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
  }

  int checked_state(int s) const {
    if (s < 0 || s >= n_states())
      throw std::domain_error("chain: start state out of range");
    return s;
  }

  static void require_quenched(const Start& start) {
    if (start.kind != StartKind::Quenched)
      throw std::invalid_argument("chain: operation requires a quenched start");
  }

  Eigen::MatrixXd q_;
  Eigen::VectorXd pi_, f_, h_, qh_;
  std::vector<std::vector<double>> cum_rows_;
  std::vector<double> probs_pi_;
};

// Residual of Q Q* - Q* Q in max norm; the chain operator is normal when the
// residual vanishes.
inline NormalOperatorResult normal_operator_check(const FiniteMarkovChain& chain,
                                                  double tol = 1e-10) {
  const Eigen::MatrixXd qs = chain.adjoint();
  const Eigen::MatrixXd& q = chain.transition();
  const double residual = (q * qs - qs * q).cwiseAbs().maxCoeff();
  return {residual <= tol, residual};
}

}  // namespace martlab::models
