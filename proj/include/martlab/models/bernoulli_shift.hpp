// bernoulli_shift.hpp - the dyadic shift Y_n = sum_k 2^{-k-1} eps_{n-k} of a
// fair-bit sequence, observed through a centered function g on (0,1).
//
// For polynomial observables every conditional expectation is a polynomial
// (the one-step prediction operator preserves degree), for indicator steps it
// is piecewise constant with one breakpoint per depth, and for arbitrary
// observables the depth-k conditional mean is the exact average over the 2^k
// innovation branches.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <martlab/errors.hpp>
#include <martlab/models/start.hpp>
#include <martlab/poly.hpp>
#include <martlab/quadrature.hpp>
#include <martlab/rng.hpp>

namespace martlab::models {

// Oscillation-budget descriptor of an observable: |E(g(Y_j)|Y_0) - E g| is
// bounded by  min(variation, holder_c * 2^{-j*holder_eta} * 2^j) * 2^{-j}
// -- i.e. the total cell oscillation over the 2^j dyadic cells.
struct ContinuityDescriptor {
  double variation = std::numeric_limits<double>::infinity();
  double holder_c = std::numeric_limits<double>::infinity();
  double holder_eta = 1.0;

  double cell_oscillation_sum(int j) const {
    const double by_variation = variation * std::pow(2.0, -j);
    const double by_holder = holder_c * std::pow(2.0, -j * holder_eta);
    return std::min(by_variation, by_holder);
  }
};

struct PolynomialObservable {
  Poly g;  // centered at construction of the model
};

struct StepObservable {
  double threshold = 0.5;  // g = 1_{[0,threshold)} - threshold
};

struct CustomObservable {
  std::function<double(double)> fn;
  ContinuityDescriptor continuity;
  std::string name = "custom";
};

using ShiftObservable = std::variant<PolynomialObservable, StepObservable, CustomObservable>;

struct BernoulliShiftSpec {
  ShiftObservable observable;
  int exact_depth = 20;  // cap for 2^k branch enumeration
};

class BernoulliShift {
 public:
  using Anchor = double;  // conditioning data at a time point: the shift value

  struct Path {
    std::vector<double> x;  // X_0..X_{H-1}
    std::vector<double> y;  // Y_0..Y_H
  };

  static constexpr int kLimitWindow = 0;
  static constexpr int kSeriesDepth = 60;  // envelopes below 2^-60 are dropped

  static constexpr int kPolyCacheDepth = 128;  // h_j below 2^-120 beyond this

  explicit BernoulliShift(BernoulliShiftSpec spec)
      : obs_(std::move(spec.observable)), exact_depth_(spec.exact_depth) {
    if (exact_depth_ < 1 || exact_depth_ > 30)
      throw std::invalid_argument("shift: exact_depth must be within [1, 30]");
    if (auto* poly = std::get_if<PolynomialObservable>(&obs_)) {
      Poly g = poly->g;
      poly->g = g - Poly::constant(g.integral());
      poly_h_.push_back(poly->g);
      Poly acc = poly->g;
      for (int j = 1; j <= kPolyCacheDepth; ++j) {
        poly_h_.push_back(shift_prediction(poly_h_.back()));
        acc = acc + poly_h_.back();
      }
      limit_poly_ = acc;
      centered_mean_ = 0.0;
    } else if (auto* cust = std::get_if<CustomObservable>(&obs_)) {
      if (!cust->fn) throw std::invalid_argument("shift: custom observable missing callable");
      centered_mean_ = adaptive_simpson(cust->fn, 0.0, 1.0, 1e-11);
    }
  }

  const ShiftObservable& observable() const { return obs_; }
  int exact_depth() const { return exact_depth_; }

  double value(double y) const {
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            return o.g(y);
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            return (y < o.threshold ? 1.0 : 0.0) - o.threshold;
          } else {
            return o.fn(y) - centered_mean_;
          }
        },
        obs_);
  }

  // Depth-j conditional mean  h_j(y) = E(g(Y_j) | Y_0 = y)
  //                                  = 2^{-j} sum_{t<2^j} g((t+y)/2^j).
  double cond_mean(int j, double y) const {
    if (j < 0) throw std::invalid_argument("cond_mean: depth must be >= 0");
    if (j == 0) return value(y);
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            return poly_cond_mean(j)(y);
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            return step_cond_mean(o.threshold, j, y);
          } else {
            if (j > exact_depth_)
              throw CapabilityError(
                  "shift: conditional mean at depth " + std::to_string(j) +
                  " exceeds the exact enumeration cap (" + std::to_string(exact_depth_) +
                  "); use the Monte Carlo estimator");
            const double scale = std::pow(2.0, -j);
            double acc = 0.0;
            const std::int64_t branches = std::int64_t{1} << j;
            for (std::int64_t t = 0; t < branches; ++t)
              acc += value((static_cast<double>(t) + y) * scale);
            return acc * scale;
          }
        },
        obs_);
  }

  // Sup-norm envelope for |h_j|, rigorous per the continuity descriptor.
  double cond_mean_envelope(int j) const {
    if (j == 0) return sup_abs_bound();
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            return o.g.lipschitz_bound() * std::pow(2.0, -j);
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            return std::pow(2.0, -j);  // one unit jump
          } else {
            return o.continuity.cell_oscillation_sum(j) * 1.0;
          }
        },
        obs_);
  }

  bool exact_depth_supported(int k) const {
    if (std::holds_alternative<CustomObservable>(obs_)) return k <= exact_depth_;
    return true;
  }

  // E(S_k | Y_0 = y) with S_k = X_0 + ... + X_{k-1} = sum_{j<k} h_j(y).
  double cond_sum_at(double y, int k) const {
    if (k < 1) throw std::invalid_argument("cond_sum_at: k >= 1");
    if (!exact_depth_supported(k - 1))
      throw CapabilityError(
          "shift: exact conditional sums limited to depth " + std::to_string(exact_depth_) +
          " for this observable; use the Monte Carlo estimator");
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += cond_mean(j, y);
    return acc;
  }

  double cond_exp_partial_sum(const Start& start, int k) const {
    require_quenched(start);
    return cond_sum_at(checked_value(start.value), k);
  }

  // ----- sampling -----

  Path sample_path(RngStream& rs, int horizon, const Start& start) const {
    if (horizon < 1) throw std::invalid_argument("sample_path: horizon >= 1");
    Path p;
    p.x.resize(horizon);
    p.y.resize(horizon + 1);
    double y = start.kind == StartKind::Stationary ? rs.next_uniform()
                                                   : checked_value(start.value);
    for (int k = 0; k < horizon; ++k) {
      p.y[k] = y;
      p.x[k] = value(y);
      y = 0.5 * (y + (rs.next_bit() ? 1.0 : 0.0));
    }
    p.y[horizon] = y;
    return p;
  }

  Anchor draw_stationary_anchor(RngStream& rs) const { return rs.next_uniform(); }

  class Stepper {
   public:
    Stepper(const BernoulliShift& model, double y) : model_(&model), y_(y) {}
    double next(RngStream& rs) {
      const double x = model_->value(y_);
      y_ = 0.5 * (y_ + (rs.next_bit() ? 1.0 : 0.0));
      return x;
    }

   private:
    const BernoulliShift* model_;
    double y_;
  };

  Stepper stepper(RngStream& rs, const Start& start) const {
    const double y = start.kind == StartKind::Stationary ? rs.next_uniform()
                                                         : checked_value(start.value);
    return Stepper(*this, y);
  }

  double sample_partial_sum(RngStream& rs, Anchor y0, int n) const {
    double y = y0, sum = 0.0;
    for (int k = 0; k < n; ++k) {
      sum += value(y);
      y = 0.5 * (y + (rs.next_bit() ? 1.0 : 0.0));
    }
    return sum;
  }

  // ----- coupling support -----

  // theta^m(y) = sum_{j<m} (1 - j/m) h_j(y); window 0 means the limit
  // h = sum_j h_j (truncated at the series depth, far below rounding).
  double theta_at_point(int m, double y) const {
    if (m == kLimitWindow) return limit_fn(y);
    if (m < 1) throw std::invalid_argument("theta: window must be >= 1 or limit");
    double acc = 0.0;
    for (int j = 0; j < m; ++j)
      acc += (1.0 - static_cast<double>(j) / m) * cond_mean(j, y);
    return acc;
  }

  double y_at_point(int m, double y) const {
    if (m == kLimitWindow) return 0.0;
    double acc = 0.0;
    for (int j = 1; j <= m; ++j) acc += cond_mean(j, y);
    return acc / static_cast<double>(m);
  }

  struct CouplingKit {
    const BernoulliShift* model = nullptr;
    int m = 1;
    bool poly_mode = false;
    Poly theta_poly, y_poly;

    double theta_point(double y) const {
      return poly_mode ? theta_poly(y) : model->theta_at_point(m, y);
    }
    double theta_at(const Path& p, int k) const { return theta_point(p.y[k]); }
    double theta_pred_at(const Path& p, int k) const {
      const double y = p.y[k];
      return 0.5 * (theta_point(0.5 * y) + theta_point(0.5 * (y + 1.0)));
    }
    double y_at(const Path& p, int k) const {
      return poly_mode ? y_poly(p.y[k]) : model->y_at_point(m, p.y[k]);
    }
    double d_at(const Path& p, int k) const {
      return theta_point(p.y[k + 1]) - theta_pred_at(p, k);
    }
  };

  CouplingKit coupling_kit(int m) const {
    if (m != kLimitWindow && m < 1)
      throw std::invalid_argument("coupling_kit: window must be >= 1 or limit");
    if (m != kLimitWindow && !exact_depth_supported(m - 1))
      throw CapabilityError("shift: coupling window exceeds the exact enumeration cap");
    CouplingKit kit;
    kit.model = this;
    kit.m = m;
    if (const auto* poly = std::get_if<PolynomialObservable>(&obs_)) {
      kit.poly_mode = true;
      if (m == kLimitWindow) {
        kit.theta_poly = limit_poly();
        kit.y_poly = Poly::constant(0.0);
      } else {
        Poly theta = Poly::constant(0.0), ysum = Poly::constant(0.0);
        for (int j = 0; j < m; ++j)
          theta = theta + poly_cond_mean(j).scaled(1.0 - static_cast<double>(j) / m);
        for (int j = 1; j <= m; ++j) ysum = ysum + poly_cond_mean(j);
        kit.theta_poly = theta;
        kit.y_poly = ysum.scaled(1.0 / m);
      }
      (void)poly;
    } else if (std::holds_alternative<CustomObservable>(obs_) && m == kLimitWindow) {
      throw CapabilityError("shift: no closed-form limit martingale for this observable");
    }
    return kit;
  }

  bool has_limit_martingale() const {
    return !std::holds_alternative<CustomObservable>(obs_);
  }

  // ----- exact second-order quantities -----

  // ||E_0(S_n)||_{L2}. Exact for polynomial and step observables; enumeration
  // plus converged quadrature for custom ones (depth capped).
  double projective_norm_exact(int n) const {
    if (n < 1) throw std::invalid_argument("projective_norm_exact: n >= 1");
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            Poly e = Poly::constant(0.0);
            for (int j = 0; j < n; ++j) e = e + poly_cond_mean(j);
            return std::sqrt(e.l2_norm2());
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            auto breaks = step_breakpoints(o.threshold, n);
            const double v = piecewise_constant_integral(
                [&](double y) {
                  const double s = cond_sum_at(y, n);
                  return s * s;
                },
                breaks);
            return std::sqrt(v);
          } else {
            if (!exact_depth_supported(n - 1))
              throw CapabilityError("shift: exact norm depth capped for this observable");
            return std::sqrt(refine_quadrature([&](double y) {
              const double s = cond_sum_at(y, n);
              return s * s;
            }));
          }
        },
        obs_);
  }

  // sigma = ||D_0|| of the limit martingale: D_0 = h(Y_1) - (Ph)(Y_0) with
  // Ph = h - g.
  std::optional<double> sigma_exact() const {
    if (std::holds_alternative<CustomObservable>(obs_)) return std::nullopt;
    if (std::holds_alternative<PolynomialObservable>(obs_)) {
      const Poly h = limit_poly();
      const Poly ph = h - std::get<PolynomialObservable>(obs_).g;
      double acc = 0.0;
      for (int e = 0; e < 2; ++e) {
        const Poly diff = h.compose_affine(0.5, 0.5 * e) - ph;
        acc += 0.5 * diff.l2_norm2();
      }
      return std::sqrt(acc);
    }
    // step observable: the integrand is piecewise constant
    const double a = std::get<StepObservable>(obs_).threshold;
    auto breaks = step_breakpoints(a, kSeriesDepth);
    std::vector<double> all = breaks;
    for (double b : breaks) {
      all.push_back(2.0 * b);        // preimages of breakpoints under y/2
      all.push_back(2.0 * b - 1.0);  // ... and under (y+1)/2
    }
    double acc = 0.0;
    for (int e = 0; e < 2; ++e) {
      acc += 0.5 * piecewise_constant_integral(
                       [&](double y) {
                         const double d =
                             limit_fn(0.5 * (y + e)) - (limit_fn(y) - value(y));
                         return d * d;
                       },
                       all);
    }
    return std::sqrt(acc);
  }

  // lag-k autocovariance E[g(Y_0) g(Y_k)] = int g h_k.
  double autocovariance(int k) const {
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            return (o.g * poly_cond_mean(k)).integral();
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            auto breaks = step_breakpoints(o.threshold, k == 0 ? 1 : k + 1);
            breaks.push_back(o.threshold);
            return piecewise_constant_integral(
                [&](double y) { return value(y) * cond_mean(k, y); }, breaks);
          } else {
            if (!exact_depth_supported(k))
              throw CapabilityError("shift: autocovariance depth capped");
            return refine_quadrature(
                [&](double y) { return value(y) * cond_mean(k, y); });
          }
        },
        obs_);
  }

  // sigma^2 via two-sided covariance summation, truncated when the envelope
  // guarantees the remainder is below tol.
  double sigma2_by_covariance(double tol = 1e-12) const {
    double acc = autocovariance(0);
    double tail_budget = observable_l2();  // |gamma_k| <= ||g|| * envelope(k)
    for (int k = 1; k <= kSeriesDepth; ++k) {
      acc += 2.0 * autocovariance(k);
      if (2.0 * tail_budget * cond_mean_envelope(k + 1) < tol * 0.5) break;
    }
    return acc;
  }

  // ||D^m|| for polynomial observables, exact:
  // D^m = theta^m(Y_1) - (P theta^m)(Y_0) with Y_1 = (Y_0 + e)/2.
  double d_norm_exact(int m) const { return poly_transition_norm(theta_window_poly(m)); }

  double d_diff_norm_exact(int m1, int m2) const {
    return poly_transition_norm(theta_window_poly(m2) - theta_window_poly(m1));
  }

  // ||S_n - M_n|| for the limit martingale (polynomial observables):
  // S_n - M_n = h(Y_0) - h(Y_n), so the norm is sqrt(2||h||^2 - 2 <h, P^n h>).
  double rest_norm_exact_limit(int n) const {
    const Poly h = limit_poly();
    Poly pnh = h;
    for (int k = 0; k < n; ++k) pnh = shift_prediction(pnh);
    const double v = 2.0 * h.l2_norm2() - 2.0 * h.l2_inner(pnh);
    return std::sqrt(std::max(v, 0.0));
  }

  double observable_l2() const {
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            return std::sqrt(o.g.l2_norm2());
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            return std::sqrt(o.threshold * (1.0 - o.threshold));
          } else {
            return std::sqrt(refine_quadrature([&](double y) {
              const double v = value(y);
              return v * v;
            }));
          }
        },
        obs_);
  }

  // Rigorous constant bound on ||E_0(S_n)|| valid for every n.
  double norm_bound_constant() const {
    double acc = observable_l2();
    for (int j = 1; j <= kSeriesDepth; ++j) acc += cond_mean_envelope(j);
    return acc;
  }

  bool has_exact_second_moments() const {
    return std::holds_alternative<PolynomialObservable>(obs_);
  }

  // Limit forecast function h = sum_j h_j evaluated pointwise.
  double limit_fn(double y) const {
    if (std::holds_alternative<PolynomialObservable>(obs_)) return limit_poly()(y);
    if (std::holds_alternative<CustomObservable>(obs_))
      throw CapabilityError("shift: no closed-form limit for this observable");
    double acc = 0.0;
    for (int j = 0; j <= kSeriesDepth; ++j) acc += cond_mean(j, y);
    return acc;
  }

  Poly limit_poly() const {
    if (!limit_poly_)
      throw CapabilityError("shift: limit polynomial requires a polynomial observable");
    return *limit_poly_;
  }

  // Breakpoints of y -> sum_{j<n} h_j(y) for a step observable.
  static std::vector<double> step_breakpoints(double a, int n) {
    std::vector<double> breaks = {a};
    for (int j = 1; j < n && j <= 52; ++j) {
      const double scaled = a * std::pow(2.0, j);
      const double frac = scaled - std::floor(scaled);
      if (frac > 0.0 && frac < 1.0) breaks.push_back(frac);
    }
    return breaks;
  }

 private:
  // All depths beyond the cache are numerically zero (coefficients contract
  // geometrically); returning the deepest cached polynomial keeps the error
  // below 2^-120.
  const Poly& poly_cond_mean(int j) const {
    return poly_h_[std::min<std::size_t>(j, poly_h_.size() - 1)];
  }

  Poly theta_window_poly(int m) const {
    if (!limit_poly_)
      throw CapabilityError("shift: exact window norms require a polynomial observable");
    if (m == kLimitWindow) return *limit_poly_;
    Poly theta = Poly::constant(0.0);
    for (int j = 0; j < m; ++j)
      theta = theta + poly_cond_mean(j).scaled(1.0 - static_cast<double>(j) / m);
    return theta;
  }

  // L2 norm of u(Y_1) - (Pu)(Y_0)
  double poly_transition_norm(const Poly& u) const {
    const Poly pu = shift_prediction(u);
    double acc = 0.0;
    for (int e = 0; e < 2; ++e) {
      const Poly diff = u.compose_affine(0.5, 0.5 * e) - pu;
      acc += 0.5 * diff.l2_norm2();
    }
    return std::sqrt(acc);
  }

  static double step_cond_mean(double a, int j, double y) {
    if (j > 50) return 0.0;  // below double resolution; envelope < 2^-50
    const double pow2j = std::pow(2.0, j);
    const double x = a * pow2j - y;
    double count = std::ceil(x);
    count = std::min(std::max(count, 0.0), pow2j);
    return count / pow2j - a;
  }

  template <class Fn>
  double refine_quadrature(Fn&& fn) const {
    // midpoint rule with resolution doubling until the relative change
    // settles (used only for custom observables)
    double prev = 0.0;
    for (int res = 1 << 8; res <= (1 << 16); res *= 2) {
      double acc = 0.0;
      for (int i = 0; i < res; ++i) acc += fn((i + 0.5) / res);
      acc /= res;
      if (res > (1 << 8) && std::abs(acc - prev) <= 1e-9 * std::max(1.0, std::abs(acc)))
        return acc;
      prev = acc;
    }
    return prev;
  }

  double sup_abs_bound() const {
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, PolynomialObservable>) {
            double m = 0.0;
            for (int i = 0; i <= 64; ++i) m = std::max(m, std::abs(o.g(i / 64.0)));
            return m + o.g.lipschitz_bound() / 64.0;
          } else if constexpr (std::is_same_v<T, StepObservable>) {
            return std::max(o.threshold, 1.0 - o.threshold);
          } else {
            double m = 0.0;
            for (int i = 0; i <= 4096; ++i)
              m = std::max(m, std::abs(value(i / 4096.0)));
            return m;
          }
        },
        obs_);
  }

  static double checked_value(double y0) {
    if (!(y0 >= 0.0 && y0 < 1.0))
      throw std::domain_error("shift: quenched start must lie in [0, 1)");
    return y0;
  }

  static void require_quenched(const Start& start) {
    if (start.kind != StartKind::Quenched)
      throw std::invalid_argument("shift: operation requires a quenched start");
  }

  ShiftObservable obs_;
  int exact_depth_;
  double centered_mean_ = 0.0;
  std::vector<Poly> poly_h_;  // h_0..h_128 for polynomial g, built up front
  std::optional<Poly> limit_poly_;
};

}  // namespace martlab::models
