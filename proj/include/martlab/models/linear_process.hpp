// linear_process.hpp - one-sided moving average X_k = sum_{i>=1} a_i eps_{k-i}
// of unit-variance i.i.d. innovations, with coefficients stored up to a
// truncation index and a declared analytic tail.
//
// Conditional expectations are coefficient sums: with prefix sums
// A(j) = a_1 + ... + a_j, the forecast coefficients are
// b_{nj} = A(j+n) - A(j), and  ||E(S_n | F_0)||^2 = sum_j b_{nj}^2  in the
// convention S_n = X_1 + ... + X_n.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/errors.hpp>
#include <martlab/models/start.hpp>
#include <martlab/rng.hpp>

namespace martlab::models {

enum class InnovationLaw { Normal, Rademacher };

// Declared analytic model for the coefficients beyond the stored range;
// used to bound truncation tails, never to silently extend sums.
struct CoefficientTail {
  enum class Kind { None, PowerLog };  // PowerLog: |a_n| <= c / (n * max(1, log n))
  Kind kind = Kind::None;
  double c = 0.0;

  double abs_coef_bound(double n) const {
    switch (kind) {
      case Kind::None:
        return 0.0;
      case Kind::PowerLog:
        return c / (n * std::max(1.0, std::log(n)));
    }
    return 0.0;
  }

  // bound on sum_{i > j} a_i^2 (integral comparison)
  double sq_tail_bound(double j) const {
    switch (kind) {
      case Kind::None:
        return 0.0;
      case Kind::PowerLog: {
        const double l = std::max(1.0, std::log(j));
        return c * c / (j * l * l);
      }
    }
    return 0.0;
  }
};

struct LinearProcessSpec {
  std::vector<double> coefficients;  // a_1..a_J
  CoefficientTail tail;
  InnovationLaw innovations = InnovationLaw::Normal;
  double innovation_variance = 1.0;
  double truncation_epsilon = 1e-6;  // cap on the declared sq tail of a
};

class LinearProcess {
 public:
  // Conditioning data at time 0: the innovations eps_{-J}..eps_0, oldest
  // first (J+1 values; X_0 itself needs eps_{-J}).
  using Anchor = std::vector<double>;

  struct Path {
    std::vector<double> x;    // X_0..X_{H-1}
    std::vector<double> eps;  // eps_{-J}..eps_H laid out as eps_k = eps[k + J]
    int j = 0;                // truncation index J of the generating model

    double innovation(int k) const { return eps[static_cast<std::size_t>(k + j)]; }
  };

  static constexpr int kLimitWindow = 0;

  explicit LinearProcess(LinearProcessSpec spec) : spec_(std::move(spec)) {
    if (spec_.coefficients.empty())
      throw std::invalid_argument("linear: needs at least one coefficient");
    if (spec_.innovation_variance <= 0.0)
      throw std::invalid_argument("linear: innovation variance must be positive");
    const double tail = spec_.tail.sq_tail_bound(static_cast<double>(order()));
    if (tail > spec_.truncation_epsilon)
      throw std::invalid_argument(
          "linear: declared coefficient tail above the truncation budget (" +
          std::to_string(tail) + ")");
    prefix_.resize(order() + 1, 0.0);
    double sq = 0.0;
    for (int i = 1; i <= order(); ++i) {
      prefix_[i] = prefix_[i - 1] + spec_.coefficients[i - 1];
      sq += spec_.coefficients[i - 1] * spec_.coefficients[i - 1];
    }
    if (!std::isfinite(sq)) throw std::invalid_argument("linear: non-finite coefficients");
  }

  int order() const { return static_cast<int>(spec_.coefficients.size()); }
  const LinearProcessSpec& spec() const { return spec_; }
  double innovation_sd() const { return std::sqrt(spec_.innovation_variance); }

  double coef(int i) const {  // a_i with zero extension
    return (i >= 1 && i <= order()) ? spec_.coefficients[i - 1] : 0.0;
  }

  // A(j) = a_1 + ... + a_j, clamped to the stored range (A(j<=0) = 0).
  double prefix_sum(int j) const {
    if (j <= 0) return 0.0;
    return prefix_[std::min(j, order())];
  }

  // b_{nj} = a_{j+1} + ... + a_{j+n}
  double forecast_coef(int n, int j) const { return prefix_sum(j + n) - prefix_sum(j); }

  // ----- projective norms -----

  struct NormValue {
    double value = 0.0;       // computed from stored coefficients
    double tail_bound = 0.0;  // bound on the contribution of truncated coefficients
  };

  // ||E(S_n|F_0)|| in the one-based convention S_n = X_1 + ... + X_n.
  NormValue projective_norm_one_based(int n) const {
    if (n < 1) throw std::invalid_argument("norm: n >= 1");
    double sq = 0.0;
    for (int j = 0; j <= order(); ++j) {
      const double b = forecast_coef(n, j);
      sq += b * b;
    }
    sq *= spec_.innovation_variance;
    NormValue out;
    out.value = std::sqrt(sq);
    out.tail_bound = std::sqrt(tail_sq_bound(n));
    return out;
  }

  // ||E_0(S_n)|| in the zero-based convention S_n = X_0 + ... + X_{n-1};
  // the time-0 term X_0 is part of the conditional expectation.
  NormValue projective_norm_zero_based(int n) const {
    if (n < 1) throw std::invalid_argument("norm: n >= 1");
    // coefficient of eps_0 is A(n-1); of eps_{-j} (j>=1) it is A(j+n-1)-A(j-1)
    double sq = 0.0;
    const double c0 = prefix_sum(n - 1);
    sq += c0 * c0;
    for (int j = 1; j <= order(); ++j) {
      const double cj = prefix_sum(j + n - 1) - prefix_sum(j - 1);
      sq += cj * cj;
    }
    sq *= spec_.innovation_variance;
    NormValue out;
    out.value = std::sqrt(sq);
    out.tail_bound = std::sqrt(tail_sq_bound(n));
    return out;
  }

  double x0_l2_norm() const {
    double sq = 0.0;
    for (int i = 1; i <= order(); ++i) sq += coef(i) * coef(i);
    return std::sqrt(spec_.innovation_variance * (sq + spec_.tail.sq_tail_bound(order())));
  }

  // E_0(S_k) evaluated on a quenched innovation history.
  double cond_exp_partial_sum(const Start& start, int k) const {
    if (k < 1) throw std::invalid_argument("cond_exp_partial_sum: k >= 1");
    const auto& hist = checked_history(start);  // hist[J - j] = eps_{-j}
    double acc = prefix_sum(k - 1) * hist[order()];
    for (int j = 1; j <= order(); ++j) {
      const double cj = prefix_sum(j + k - 1) - prefix_sum(j - 1);
      acc += cj * hist[order() - j];
    }
    return acc;
  }

  // ----- sampling -----

  Path sample_path(RngStream& rs, int horizon, const Start& start) const {
    if (horizon < 1) throw std::invalid_argument("sample_path: horizon >= 1");
    const int j = order();
    Path p;
    p.j = j;
    p.x.resize(horizon);
    p.eps.resize(static_cast<std::size_t>(j) + 1 + horizon);
    if (start.kind == StartKind::Stationary) {
      for (int i = 0; i <= j; ++i) p.eps[i] = draw_innovation(rs);
    } else {
      const auto& hist = checked_history(start);
      for (int i = 0; i <= j; ++i) p.eps[i] = hist[i];
    }
    for (int k = 1; k <= horizon; ++k) p.eps[j + k] = draw_innovation(rs);
    for (int k = 0; k < horizon; ++k) {
      double v = 0.0;
      for (int i = 1; i <= j; ++i) v += coef(i) * p.eps[j + k - i];
      p.x[k] = v;
    }
    return p;
  }

  Anchor draw_stationary_anchor(RngStream& rs) const {
    Anchor a(order() + 1);
    for (auto& e : a) e = draw_innovation(rs);
    return a;
  }

  // Streaming sampler over a ring buffer of the last J+1 innovations.
  class Stepper {
   public:
    Stepper(const LinearProcess& model, std::vector<double> window)
        : model_(&model), ring_(std::move(window)), head_(ring_.size() - 1) {}
    double next(RngStream& rs) {
      const int j = model_->order();
      double x = 0.0;
      // X_k uses eps_{k-1}..eps_{k-J}; head_ currently points at eps_k
      for (int i = 1; i <= j; ++i)
        x += model_->coef(i) * ring_[(head_ + ring_.size() - i) % ring_.size()];
      head_ = (head_ + 1) % ring_.size();
      ring_[head_] = model_->draw_innovation(rs);
      return x;
    }

   private:
    const LinearProcess* model_;
    std::vector<double> ring_;
    std::size_t head_;
  };

  Stepper stepper(RngStream& rs, const Start& start) const {
    std::vector<double> window;
    if (start.kind == StartKind::Stationary) {
      window.resize(order() + 1);
      for (auto& e : window) e = draw_innovation(rs);
    } else {
      window = checked_history(start);
    }
    return Stepper(*this, std::move(window));
  }

  double sample_partial_sum(RngStream& rs, const Anchor& hist, int n) const {
    const int j = order();
    std::vector<double> eps(hist.begin(), hist.end());
    eps.resize(static_cast<std::size_t>(j) + 1 + n);
    for (int k = 1; k < n; ++k) eps[j + k] = draw_innovation(rs);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int i = 1; i <= j; ++i) v += coef(i) * eps[j + k - i];
      sum += v;
    }
    return sum;
  }

  // ----- coupling support -----

  // theta^m_k = w_0 eps_k + sum_{j>=1} w_j eps_{k-j} with
  //   w_0 = sum_{l=1}^{m-1} (1 - l/m) a_l
  //   w_j = sum_{l=0}^{m-1} (1 - l/m) a_{l+j}
  // so that D^m_k = w_0 eps_{k+1}; the limit window replaces the triangular
  // weights by full coefficient tails.
  struct CouplingKit {
    std::vector<double> theta_w;  // weights for eps_k, eps_{k-1}, ...
    std::vector<double> y_w;      // weights of Y^m_k in the same layout
    double d_scale = 0.0;         // D_k = d_scale * eps_{k+1}

    double dot(const Path& p, int k, const std::vector<double>& w) const {
      double acc = 0.0;
      const int base = k + p.j;  // index of eps_k in p.eps
      const int depth = std::min<int>(static_cast<int>(w.size()), base + 1);
      for (int j = 0; j < depth; ++j) acc += w[j] * p.eps[base - j];
      return acc;
    }

    double theta_at(const Path& p, int k) const { return dot(p, k, theta_w); }
    // theta_{k+1} with its eps_{k+1} term removed
    double theta_pred_at(const Path& p, int k) const {
      double acc = 0.0;
      const int base = k + p.j;
      const int depth = std::min<int>(static_cast<int>(theta_w.size()) - 1, base + 1);
      for (int j = 0; j < depth; ++j) acc += theta_w[j + 1] * p.eps[base - j];
      return acc;
    }
    double y_at(const Path& p, int k) const { return dot(p, k, y_w); }
    double d_at(const Path& p, int k) const { return d_scale * p.eps[k + 1 + p.j]; }
  };

  CouplingKit coupling_kit(int m) const {
    CouplingKit kit;
    const int j_max = order();
    kit.theta_w.assign(j_max + 1, 0.0);
    kit.y_w.assign(j_max + 1, 0.0);
    if (m == kLimitWindow) {
      kit.theta_w[0] = prefix_sum(order());
      for (int j = 1; j <= j_max; ++j)
        kit.theta_w[j] = prefix_sum(order()) - prefix_sum(j - 1);
      kit.d_scale = kit.theta_w[0];
      return kit;
    }
    if (m < 1) throw std::invalid_argument("coupling_kit: window must be >= 1 or limit");
    for (int l = 1; l < m; ++l)
      kit.theta_w[0] += (1.0 - static_cast<double>(l) / m) * coef(l);
    for (int j = 1; j <= j_max; ++j)
      for (int l = 0; l < m; ++l)
        kit.theta_w[j] += (1.0 - static_cast<double>(l) / m) * coef(l + j);
    for (int j = 0; j <= j_max; ++j) {
      double acc = 0.0;
      for (int l = 1; l <= m; ++l) acc += coef(l + j);
      kit.y_w[j] = acc / static_cast<double>(m);
    }
    kit.d_scale = kit.theta_w[0];
    return kit;
  }

  bool has_limit_martingale() const { return true; }
  bool has_exact_second_moments() const { return true; }

  // sigma = |sum_i a_i| * sd(eps) for the limit martingale.
  double sigma_exact() const { return std::abs(prefix_sum(order())) * innovation_sd(); }

  double d_norm_exact(int m) const {
    return std::abs(coupling_kit(m).d_scale) * innovation_sd();
  }

  double d_diff_norm_exact(int m1, int m2) const {
    return std::abs(coupling_kit(m2).d_scale - coupling_kit(m1).d_scale) * innovation_sd();
  }

  // ||S_n - M_n^m||, exact in coefficient space (limit window included):
  // the eps_k coefficient of S_n is A(n-1-k) - A(-k-1), that of M_n^m is
  // d_scale on 1 <= k <= n.
  double rest_norm_exact(int n, int m) const {
    const auto kit = coupling_kit(m);
    double sq = 0.0;
    for (int k = -order(); k <= n; ++k) {
      const double s_coef = prefix_sum(n - 1 - k) - prefix_sum(-k - 1);
      const double m_coef = (k >= 1 && k <= n) ? kit.d_scale : 0.0;
      const double r = s_coef - m_coef;
      sq += r * r;
    }
    return std::sqrt(sq * spec_.innovation_variance);
  }

  double autocovariance(int k) const {
    double acc = 0.0;
    for (int i = 1; i + k <= order(); ++i) acc += coef(i) * coef(i + k);
    return acc * spec_.innovation_variance;
  }

 private:
  // bound on the truncated part of sum_j b_{nj}^2: |b_{nj}| <= n * |a|-bound
  // and the slots decay like the declared tail
  double tail_sq_bound(int n) const {
    if (spec_.tail.kind == CoefficientTail::Kind::None) return 0.0;
    const double jj = static_cast<double>(order());
    const double per = spec_.tail.abs_coef_bound(jj + 1.0);
    return spec_.innovation_variance * static_cast<double>(n) * n * per * per * jj;
  }

  double draw_innovation(RngStream& rs) const {
    const double sd = innovation_sd();
    switch (spec_.innovations) {
      case InnovationLaw::Normal:
        return sd * rs.next_normal();
      case InnovationLaw::Rademacher:
        return rs.next_bit() ? sd : -sd;
    }
    return 0.0;
  }

  const std::vector<double>& checked_history(const Start& start) const {
    if (start.kind != StartKind::Quenched)
      throw std::invalid_argument("linear: operation requires a quenched start");
    if (static_cast<int>(start.history.size()) != order() + 1)
      throw std::domain_error("linear: quenched history must have length " +
                              std::to_string(order() + 1));
    return start.history;
  }

  LinearProcessSpec spec_;
  std::vector<double> prefix_;
};

}  // namespace martlab::models
