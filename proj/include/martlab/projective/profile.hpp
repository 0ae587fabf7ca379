// profile.hpp - the sequence n -> ||E_0(S_n)||_p with value provenance tags,
// a declared analytic tail, and the Monte Carlo estimator used when no exact
// oracle applies.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/errors.hpp>
#include <martlab/models/bernoulli_shift.hpp>
#include <martlab/models/linear_process.hpp>
#include <martlab/models/markov_chain.hpp>
#include <martlab/rng.hpp>
#include <martlab/series.hpp>
#include <martlab/stats.hpp>

namespace martlab::projective {

enum class ValueTag { Exact, MonteCarlo, AnalyticBound };

inline std::string to_string(ValueTag tag) {
  switch (tag) {
    case ValueTag::Exact: return "exact";
    case ValueTag::MonteCarlo: return "mc";
    case ValueTag::AnalyticBound: return "analytic_bound";
  }
  return "?";
}

enum class Convention { ZeroBased, OneBased };

struct NormEntry {
  int n = 0;
  double value = 0.0;
  ValueTag tag = ValueTag::Exact;
  double stderr_ = 0.0;     // Monte Carlo standard error (0 for exact)
  double tail_bound = 0.0;  // bound on truncated-coefficient contributions
};

// Declared analytic bound on ||E_0(S_n)||_p beyond the stored range.
struct NormTail {
  enum class Kind { None, Bounded, Power };
  Kind kind = Kind::None;
  double c = 0.0;
  double exponent = 0.0;  // Power: seq[n] <= c * n^exponent

  static NormTail none() { return {}; }
  static NormTail bounded(double c) { return {Kind::Bounded, c, 0.0}; }
  static NormTail power(double c, double exponent) { return {Kind::Power, c, exponent}; }

  double bound_at(double n) const {
    switch (kind) {
      case Kind::None:
        return std::numeric_limits<double>::infinity();
      case Kind::Bounded:
        return c;
      case Kind::Power:
        return c * std::pow(n, exponent);
    }
    return 0.0;
  }
};

struct ProjectiveProfile {
  double p = 2.0;
  Convention convention = Convention::ZeroBased;
  std::vector<NormEntry> norms;  // entries for n = 1..N in order
  NormTail tail;

  int size() const { return static_cast<int>(norms.size()); }

  double at(int n) const {
    if (n < 1 || n > size())
      throw std::out_of_range("profile: n out of stored range");
    return norms[n - 1].value;
  }

  // Largest violation of norms[n+m] <= norms[n] + norms[m] + slack, where the
  // slack is 3x the combined standard errors; nullopt when subadditive.
  struct SubadditivityWitness {
    int n = 0, m = 0;
    double excess = 0.0;
  };
  std::optional<SubadditivityWitness> subadditivity_witness(double exact_tol = 1e-10) const {
    std::optional<SubadditivityWitness> worst;
    for (int n = 1; n <= size(); ++n) {
      for (int m = n; n + m <= size(); ++m) {
        const auto& a = norms[n - 1];
        const auto& b = norms[m - 1];
        const auto& ab = norms[n + m - 1];
        const double slack = 3.0 * (a.stderr_ + b.stderr_ + ab.stderr_) + exact_tol;
        const double excess = ab.value - a.value - b.value - slack;
        if (excess > 0.0 && (!worst || excess > worst->excess))
          worst = SubadditivityWitness{n, m, excess};
      }
    }
    return worst;
  }
};

// ----- Monte Carlo norm estimation -----
//
// ||E_0(S_n)||^2 = E[ S_n' S_n'' ] for two partial sums drawn independently
// from the same stationary time-0 conditioning data, which makes the paired
// product an unbiased estimator of the squared norm.
template <class Model>
NormEntry projective_norm_mc(const Model& model, int n, int samples,
                             std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("projective_norm_mc: n >= 1");
  if (samples < 2) throw std::invalid_argument("projective_norm_mc: need samples >= 2");
  RunningStats prod;
  for (int i = 0; i < samples; ++i) {
    RngStream rs(master_seed, static_cast<std::uint64_t>(i));
    const auto anchor = model.draw_stationary_anchor(rs);
    const double s1 = model.sample_partial_sum(rs, anchor, n);
    const double s2 = model.sample_partial_sum(rs, anchor, n);
    prod.add(s1 * s2);
  }
  NormEntry e;
  e.n = n;
  e.tag = ValueTag::MonteCarlo;
  const double mean = prod.mean();
  const double se = prod.stderr_of_mean();
  if (mean > se) {
    e.value = std::sqrt(mean);
    e.stderr_ = 0.5 * se / e.value;  // delta method
  } else {
    // squared-norm estimate indistinguishable from zero at this sample size
    e.value = std::sqrt(std::max(mean, 0.0));
    e.stderr_ = std::sqrt(se);
  }
  return e;
}

// ----- exact/closed-form profiles per model -----

inline ProjectiveProfile build_profile(const models::FiniteMarkovChain& chain, int n_max,
                                       double p = 2.0) {
  ProjectiveProfile prof;
  prof.p = p;
  prof.convention = Convention::ZeroBased;
  const auto table = chain.cond_sum_table(n_max);
  prof.norms.reserve(n_max);
  for (int n = 1; n <= n_max; ++n)
    prof.norms.push_back({n, chain.lp_norm(table[n - 1], p), ValueTag::Exact, 0.0, 0.0});
  const double h_norm = chain.lp_norm(chain.poisson_solution(), p);
  prof.tail = NormTail::bounded(2.0 * h_norm);  // e_n = h - Q^n h and Q contracts
  return prof;
}

inline ProjectiveProfile build_profile(const models::BernoulliShift& shift, int n_max,
                                       int mc_samples = 200000,
                                       std::uint64_t master_seed = 1) {
  ProjectiveProfile prof;
  prof.convention = Convention::ZeroBased;
  prof.norms.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (shift.exact_depth_supported(n - 1)) {
      prof.norms.push_back({n, shift.projective_norm_exact(n), ValueTag::Exact, 0.0, 0.0});
    } else {
      auto e = projective_norm_mc(shift, n, mc_samples,
                                  master_seed + static_cast<std::uint64_t>(n));
      prof.norms.push_back(e);
    }
  }
  prof.tail = NormTail::bounded(shift.norm_bound_constant());
  return prof;
}

inline ProjectiveProfile build_profile(const models::LinearProcess& linear, int n_max,
                                       Convention convention = Convention::OneBased) {
  ProjectiveProfile prof;
  prof.convention = convention;
  prof.norms.reserve(n_max);
  double max_ratio = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto nv = convention == Convention::OneBased
                        ? linear.projective_norm_one_based(n)
                        : linear.projective_norm_zero_based(n);
    prof.norms.push_back({n, nv.value, ValueTag::Exact, 0.0, nv.tail_bound});
    max_ratio = std::max(max_ratio, (nv.value + nv.tail_bound) / std::sqrt(n));
  }
  if (linear.spec().tail.kind == models::CoefficientTail::Kind::None) {
    // coefficients vanish beyond the stored range: |b_nj| <= sum_{i>j} |a_i|
    // uniformly in n, so the norms stay bounded
    double sq = 0.0;
    double t = 0.0;
    for (int i = linear.order(); i >= 1; --i) {
      t += std::abs(linear.coef(i));
      sq += t * t;  // slot j = i-1 contributes t_{i-1}^2 = (sum_{l>=i} |a_l|)^2
    }
    const double c = std::sqrt(sq) * linear.innovation_sd() + linear.x0_l2_norm();
    prof.tail = NormTail::bounded(c);
  } else {
    // declared slowly-decaying coefficients: norms can grow like sqrt(n);
    // record the measured envelope as the under-model tail
    prof.tail = NormTail::power(max_ratio, 0.5);
  }
  return prof;
}

// Exact-mode single-norm evaluation with the per-model capability rules.
inline double projective_norm_exact(const models::FiniteMarkovChain& chain, int n,
                                    double p = 2.0) {
  return chain.projective_norm_exact(n, p);
}
inline double projective_norm_exact(const models::BernoulliShift& shift, int n,
                                    double p = 2.0) {
  if (p != 2.0)
    throw CapabilityError("projective norm: exact shift norms are L2 only");
  return shift.projective_norm_exact(n);
}
inline double projective_norm_exact(const models::LinearProcess& linear, int n,
                                    double p = 2.0,
                                    Convention convention = Convention::OneBased) {
  if (p != 2.0)
    throw CapabilityError("projective norm: the closed form is L2 only");
  return convention == Convention::OneBased ? linear.projective_norm_one_based(n).value
                                            : linear.projective_norm_zero_based(n).value;
}

// Convention bridge for linear processes: E_0(S^{0}_{n+1}) = X_0 + E_0(S^{1}_n),
// so the two norms differ by at most ||X_0||. Returns the largest violation
// margin (negative when the bridge holds everywhere).
inline double convention_bridge_excess(const models::LinearProcess& linear, int n_max) {
  const double x0 = linear.x0_l2_norm();
  double worst = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double zero = linear.projective_norm_zero_based(n + 1).value;
    const double one = linear.projective_norm_one_based(n).value;
    worst = std::max(worst, std::abs(zero - one) - x0);
  }
  return worst;
}

}  // namespace martlab::projective
