// poly.hpp - small dense polynomials on [0,1] in the monomial basis.
// Used for closed-form conditional expectations of polynomial observables
// of the dyadic shift: the one-step prediction operator maps polynomials to
// polynomials of the same degree.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace martlab {

class Poly {
 public:
  Poly() : c_{0.0} {}
  explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  static Poly constant(double v) { return Poly({v}); }

  const std::vector<double>& coeffs() const { return c_; }
  std::size_t degree() const { return c_.size() - 1; }

  double operator()(double y) const {
    double v = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) v = v * y + c_[i];
    return v;
  }

  Poly operator+(const Poly& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Poly(r);
  }

  Poly operator-(const Poly& o) const { return *this + o.scaled(-1.0); }

  Poly operator*(const Poly& o) const {
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(r);
  }

  Poly scaled(double s) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= s;
    return Poly(r);
  }

  // p(s*y + t)
  Poly compose_affine(double s, double t) const {
    Poly result = constant(0.0);
    Poly base = constant(1.0);
    const Poly lin({t, s});
    for (std::size_t i = 0; i < c_.size(); ++i) {
      result = result + base.scaled(c_[i]);
      base = base * lin;
    }
    return result;
  }

  // integral over [0,1]
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] / static_cast<double>(i + 1);
    return s;
  }

  double l2_inner(const Poly& o) const { return (*this * o).integral(); }
  double l2_norm2() const { return l2_inner(*this); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  // Derivative sup-norm bound on [0,1] via the triangle inequality.
  double lipschitz_bound() const {
    double m = 0.0;
    for (std::size_t i = 1; i < c_.size(); ++i) m += static_cast<double>(i) * std::abs(c_[i]);
    return m;
  }

 private:
  std::vector<double> c_;
};

// One-step prediction operator of the dyadic shift on polynomials:
// (Pu)(y) = (u(y/2) + u((y+1)/2)) / 2.
inline Poly shift_prediction(const Poly& u) {
  return (u.compose_affine(0.5, 0.0) + u.compose_affine(0.5, 0.5)).scaled(0.5);
}

}  // namespace martlab
