// conditions.hpp - summability diagnostics on forecast-norm sequences: the
// tail series sum_{k>=n} ||E_0(S_k)||/k^{3/2}, its weighted square-summability
// variants, and the dyadic equivalent used by the averaged criterion.
//
// A finite machine cannot decide convergence of a series, so every verdict is
// conditional on a declared analytic model of the norms: either the profile's
// tail bound (data-driven profiles) or a closed-form rate family. Verdicts
// carry the "under_model" qualification through the report type.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/projective/profile.hpp>
#include <martlab/series.hpp>

namespace martlab::projective {

enum class ConditionId {
  MW,            // sum_k ||E_0(S_k)|| / k^{3/2} < inf
  Slow,          // sum_n b_n/n * T_n^2 < inf
  MWLog2,        // Slow with b_n = log n
  MWAve,         // sum_n 1/n * T_n^2 < inf
  HighLog,       // sum_n 1/(n loglog n) * T_n^2 < inf
  NormalChain,   // sum_n log n * ||E_0(S_n)||^2 / n^2 < inf
  BStarSummable  // sum_n 1/(n b_n) < inf
};

inline std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::MW: return "MW";
    case ConditionId::Slow: return "slow";
    case ConditionId::MWLog2: return "MWlog2";
    case ConditionId::MWAve: return "MWave";
    case ConditionId::HighLog: return "highlog";
    case ConditionId::NormalChain: return "normal_chain";
    case ConditionId::BStarSummable: return "bstar_summable";
  }
  return "?";
}

inline std::optional<ConditionId> condition_from_string(const std::string& s) {
  if (s == "MW") return ConditionId::MW;
  if (s == "slow") return ConditionId::Slow;
  if (s == "MWlog2") return ConditionId::MWLog2;
  if (s == "MWave") return ConditionId::MWAve;
  if (s == "highlog") return ConditionId::HighLog;
  if (s == "normal_chain") return ConditionId::NormalChain;
  if (s == "bstar_summable") return ConditionId::BStarSummable;
  return std::nullopt;
}

enum class Verdict { ConvergesUnderModel, DivergesUnderModel, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ConvergesUnderModel: return "converges_under_model";
    case Verdict::DivergesUnderModel: return "diverges_under_model";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConditionReport {
  ConditionId id = ConditionId::MW;
  int N = 0;                // partial-sum horizon
  double partial_sum = 0.0; // sum over stored indices
  double tail_bound = 0.0;  // upper bound on the remainder (inf when unknown)
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

// ----- tail rest sums on data profiles -----

// sum_{k >= n} seq[k]/k^{3/2} with the completion implied by the profile's
// declared tail: Bounded c adds c * zeta_tail, Power(c, q<1/2) adds the
// shifted zeta tail, None leaves the remainder unbounded.
struct TailRestSum {
  double stored = 0.0;
  double completion = 0.0;  // inf when the tail model cannot bound it
  double total() const { return stored + completion; }
};

inline TailRestSum tail_rest_sum_detail(const ProjectiveProfile& prof, int n) {
  if (n < 1) throw std::invalid_argument("tail_rest_sum: n >= 1");
  TailRestSum out;
  const int N = prof.size();
  for (int k = std::max(n, 1); k <= N; ++k)
    out.stored += prof.norms[k - 1].value / std::pow(static_cast<double>(k), 1.5);
  const int from = std::max(n, N + 1);
  switch (prof.tail.kind) {
    case NormTail::Kind::None:
      out.completion = std::numeric_limits<double>::infinity();
      break;
    case NormTail::Kind::Bounded:
      out.completion = prof.tail.c * zeta_tail(1.5, static_cast<std::uint64_t>(from));
      break;
    case NormTail::Kind::Power:
      if (prof.tail.exponent >= 0.5) {
        out.completion = std::numeric_limits<double>::infinity();
      } else {
        out.completion =
            prof.tail.c * zeta_tail(1.5 - prof.tail.exponent,
                                    static_cast<std::uint64_t>(from));
      }
      break;
  }
  return out;
}

inline double tail_rest_sum(const ProjectiveProfile& prof, int n) {
  return tail_rest_sum_detail(prof, n).total();
}

// Partial sums of Delta(X_0) = sum_k ||E_0(S_k)||/k^{3/2} with tail verdict.
inline ConditionReport delta_mw(const ProjectiveProfile& prof) {
  ConditionReport rep;
  rep.id = ConditionId::MW;
  rep.N = prof.size();
  const auto t1 = tail_rest_sum_detail(prof, 1);
  rep.partial_sum = t1.stored;
  rep.tail_bound = t1.completion;
  rep.verdict = std::isfinite(t1.completion) ? Verdict::ConvergesUnderModel
                                             : Verdict::Inconclusive;
  return rep;
}

// ----- closed-form rate families -----

// seq(n) = c * n^{1/2} (log n)^a (loglog n)^b  with both logs clamped at 1.
struct RateFamily {
  double c = 1.0;
  double log_exp = 0.0;
  double loglog_exp = 0.0;

  double value(std::uint64_t n) const {
    const double x = static_cast<double>(n);
    return c * std::sqrt(x) * std::pow(log_clamped(x), log_exp) *
           std::pow(loglog_clamped(x), loglog_exp);
  }
};

namespace detail {

constexpr double kExpTol = 1e-12;

// Asymptotic log-power exponents of T_n = sum_{k>=n} seq(k)/k^{3/2} for a
// rate family; nullopt when the tail series itself diverges.
struct TailExponents {
  double log_exp = 0.0;
  double loglog_exp = 0.0;
};

inline std::optional<TailExponents> tail_exponents(const RateFamily& f) {
  // summand ~ n^{-1} (log n)^a (loglog n)^b
  if (f.log_exp > -1.0 + kExpTol) return std::nullopt;
  if (std::abs(f.log_exp + 1.0) <= kExpTol) {
    if (f.loglog_exp >= -1.0 - kExpTol) return std::nullopt;
    return TailExponents{0.0, f.loglog_exp + 1.0};
  }
  return TailExponents{f.log_exp + 1.0, f.loglog_exp};
}

inline Verdict verdict_of(bool converges) {
  return converges ? Verdict::ConvergesUnderModel : Verdict::DivergesUnderModel;
}

}  // namespace detail

// Symbolic classification of a condition for a rate-family norm model;
// exact under the declared family.
inline Verdict classify_condition(ConditionId id, const RateFamily& f,
                                  const SlowlyVaryingSeq& b) {
  using detail::kExpTol;
  const auto mw_term = LogPowerSeries{f.log_exp, f.loglog_exp};
  switch (id) {
    case ConditionId::MW:
      return detail::verdict_of(mw_term.converges());
    case ConditionId::NormalChain:
      // summand ~ n^{-1} (log n)^{1+2a} (loglog n)^{2b}
      return detail::verdict_of(
          LogPowerSeries{1.0 + 2.0 * f.log_exp, 2.0 * f.loglog_exp}.converges());
    case ConditionId::BStarSummable:
      return detail::verdict_of(LogPowerSeries{-b.alpha, -b.beta}.converges());
    default:
      break;
  }
  const auto tail = detail::tail_exponents(f);
  if (!tail) return Verdict::DivergesUnderModel;  // T_n does not even vanish
  double kappa = 0.0, lambda = 0.0;
  switch (id) {
    case ConditionId::Slow:
      kappa = b.alpha;
      lambda = b.beta;
      break;
    case ConditionId::MWLog2:
      kappa = 1.0;
      break;
    case ConditionId::MWAve:
      break;
    case ConditionId::HighLog:
      lambda = -1.0;
      break;
    default:
      throw std::invalid_argument("classify_condition: unhandled id");
  }
  return detail::verdict_of(LogPowerSeries{kappa + 2.0 * tail->log_exp,
                                           lambda + 2.0 * tail->loglog_exp}
                                .converges());
}

namespace detail {

// weight w(n) of the condition series sum_n w(n) T_n^2 (or w(n) for the
// scalar conditions)
inline double condition_weight(ConditionId id, std::uint64_t n,
                               const SlowlyVaryingSeq& b) {
  const double x = static_cast<double>(n);
  switch (id) {
    case ConditionId::Slow:
      return b(n) / x;
    case ConditionId::MWLog2:
      return log_clamped(x) / x;
    case ConditionId::MWAve:
      return 1.0 / x;
    case ConditionId::HighLog:
      return 1.0 / (x * loglog_clamped(x));
    default:
      throw std::invalid_argument("condition_weight: unhandled id");
  }
}

}  // namespace detail

// ----- data-profile condition checks -----
//
// Partial sums run over the stored range. The remainder bound uses the
// declared norm tail: with a Bounded(c) tail, T_n <= c * 2/sqrt(n-1) beyond
// the stored range, and the remainder of every weighted-square condition is
// summed explicitly to a large horizon plus a closed-form overshoot using
// b_n <= b_M sqrt(n/M).
inline ConditionReport check_condition(ConditionId id, const ProjectiveProfile& prof,
                                       const SlowlyVaryingSeq& b = SlowlyVaryingSeq()) {
  ConditionReport rep;
  rep.id = id;
  rep.N = prof.size();
  const int N = prof.size();
  if (N < 8) throw std::invalid_argument("check_condition: profile too short");

  if (id == ConditionId::MW) return delta_mw(prof);

  if (id == ConditionId::BStarSummable) {
    // scalar condition on the weight sequence alone
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(N); ++n)
      acc += 1.0 / (static_cast<double>(n) * b(n));
    rep.partial_sum = acc;
    rep.verdict = detail::verdict_of(LogPowerSeries{-b.alpha, -b.beta}.converges());
    rep.tail_bound = std::numeric_limits<double>::infinity();
    if (rep.verdict == Verdict::ConvergesUnderModel) {
      // b is nondecreasing: remainder <= sum_{n>N} n^{-1} b_N^{-1} ... still
      // divergent termwise; report the next dyadic block sum as a diagnostic
      double block = 0.0;
      for (std::uint64_t n = N + 1; n <= static_cast<std::uint64_t>(2) * N; ++n)
        block += 1.0 / (static_cast<double>(n) * b(n));
      rep.tail_bound = block;
      rep.note = "tail_bound reports the next dyadic block of the series";
    }
    return rep;
  }

  if (id == ConditionId::NormalChain) {
    double acc = 0.0;
    for (int n = 2; n <= N; ++n) {
      const double v = prof.norms[n - 1].value;
      acc += std::log(static_cast<double>(n)) * v * v /
             (static_cast<double>(n) * n);
    }
    rep.partial_sum = acc;
    const std::uint64_t M = 1u << 20;
    if (prof.tail.kind == NormTail::Kind::Bounded) {
      // remainder <= c^2 sum_{n>N} log n / n^2
      double tail = 0.0;
      const double c2 = prof.tail.c * prof.tail.c;
      for (std::uint64_t n = N + 1; n <= M; ++n)
        tail += std::log(static_cast<double>(n)) / (static_cast<double>(n) * n);
      tail += (std::log(static_cast<double>(M)) + 1.0) / static_cast<double>(M);
      rep.tail_bound = c2 * tail;
      rep.verdict = Verdict::ConvergesUnderModel;
    } else if (prof.tail.kind == NormTail::Kind::Power && prof.tail.exponent < 0.5) {
      // remainder <= c^2 sum_{n>N} log n * n^{2q-2}, summable since 2q-2 < -1
      const double q2 = 2.0 * prof.tail.exponent - 2.0;
      double tail = 0.0;
      for (std::uint64_t n = N + 1; n <= M; ++n)
        tail += std::log(static_cast<double>(n)) *
                std::pow(static_cast<double>(n), q2);
      const double s = -q2 - 1.0;  // > 0
      tail += (std::log(static_cast<double>(M)) / s + 1.0 / (s * s)) *
              std::pow(static_cast<double>(M), -s);
      rep.tail_bound = prof.tail.c * prof.tail.c * tail;
      rep.verdict = Verdict::ConvergesUnderModel;
    } else {
      rep.tail_bound = std::numeric_limits<double>::infinity();
      rep.verdict = Verdict::Inconclusive;
    }
    return rep;
  }

  // weighted-square conditions on T_n
  double acc = 0.0;
  {
    // T_n over the stored range by backward recursion, completed by the tail
    double t = tail_rest_sum_detail(prof, N + 1).completion;
    std::vector<double> tvals(N + 2, 0.0);
    tvals[N + 1] = t;
    for (int k = N; k >= 1; --k)
      tvals[k] = tvals[k + 1] +
                 prof.norms[k - 1].value / std::pow(static_cast<double>(k), 1.5);
    if (!std::isfinite(tvals[1])) {
      rep.partial_sum = std::numeric_limits<double>::infinity();
      rep.tail_bound = std::numeric_limits<double>::infinity();
      rep.verdict = Verdict::Inconclusive;
      rep.note = "tail model cannot bound the rest sums";
      return rep;
    }
    for (int n = 1; n <= N; ++n)
      acc += detail::condition_weight(id, n, b) * tvals[n] * tvals[n];
  }
  rep.partial_sum = acc;

  if (prof.tail.kind == NormTail::Kind::Bounded) {
    // Beyond the stored range T_n <= c sum_{k>=n} k^{-3/2} <= 2sqrt(2) c n^{-1/2},
    // so the remainder integrand is at most 8 c^2 W(n)/n^2 where W(n) = n w(n)
    // is the slowly varying part of the weight. Sum explicitly to M, then use
    // W(n) <= W(M) sqrt(n/M) (valid while the log exponents stay below ~7,
    // which covers every weight used here).
    if (b.alpha + b.beta > 7.0) {
      rep.tail_bound = std::numeric_limits<double>::infinity();
      rep.verdict = Verdict::Inconclusive;
      rep.note = "weight exponents too large for the built-in remainder bound";
      return rep;
    }
    const double c = prof.tail.c;
    double tail = 0.0;
    const std::uint64_t M = 1u << 20;
    for (std::uint64_t n = N + 1; n <= M; ++n)
      tail += 8.0 * c * c * detail::condition_weight(id, n, b) /
              static_cast<double>(n);
    const double w_cap = detail::condition_weight(id, M, b) * static_cast<double>(M);
    tail += 8.0 * c * c * w_cap / std::sqrt(static_cast<double>(M)) *
            zeta_tail(1.5, M);
    rep.tail_bound = tail;
    rep.verdict = Verdict::ConvergesUnderModel;
  } else {
    rep.tail_bound = std::numeric_limits<double>::infinity();
    rep.verdict = Verdict::Inconclusive;
    rep.note = "verdict limited by the declared tail model";
  }
  return rep;
}

// Rate-family condition check: symbolic verdict plus numeric partial sums.
inline ConditionReport check_condition(ConditionId id, const RateFamily& family,
                                       const SlowlyVaryingSeq& b = SlowlyVaryingSeq(),
                                       int n_partial = 1 << 16) {
  ConditionReport rep;
  rep.id = id;
  rep.N = n_partial;
  rep.verdict = classify_condition(id, family, b);
  rep.note = "verdict by exponent classification under the declared rate family";

  // numeric partial sums for the report (estimate, not a bound)
  if (id == ConditionId::MW) {
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(n_partial); ++k)
      acc += family.value(k) / std::pow(static_cast<double>(k), 1.5);
    rep.partial_sum = acc;
    rep.tail_bound = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (id == ConditionId::BStarSummable) {
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(n_partial); ++n)
      acc += 1.0 / (static_cast<double>(n) * b(n));
    rep.partial_sum = acc;
    rep.tail_bound = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (id == ConditionId::NormalChain) {
    double acc = 0.0;
    for (std::uint64_t n = 2; n <= static_cast<std::uint64_t>(n_partial); ++n) {
      const double v = family.value(n);
      acc += std::log(static_cast<double>(n)) * v * v / (static_cast<double>(n) * n);
    }
    rep.partial_sum = acc;
    rep.tail_bound = std::numeric_limits<double>::infinity();
    return rep;
  }

  // T_n by backward recursion with an integral tail estimate at the horizon
  const int N = n_partial;
  std::vector<double> tvals(N + 2, 0.0);
  {
    // estimate sum_{k>N} (log k)^a (loglog k)^b / k by the substitution
    // u = log k (trapezoid on a geometric grid)
    const double a = family.log_exp, bb = family.loglog_exp;
    double est = 0.0;
    if (a < -1.0 || (a == -1.0 && bb < -1.0)) {
      double u = std::log(static_cast<double>(N));
      const double du = 0.01;
      for (int i = 0; i < 400000; ++i) {
        const double uu = u + (i + 0.5) * du;
        const double term = std::pow(uu, a) * std::pow(std::max(1.0, std::log(uu)), bb);
        est += term * du;
        if (term * du < 1e-16 * std::max(est, 1e-300) && i > 1000) break;
      }
      est *= family.c;
    } else {
      est = std::numeric_limits<double>::infinity();
    }
    tvals[N + 1] = est;
  }
  for (int k = N; k >= 1; --k)
    tvals[k] = tvals[k + 1] + family.value(k) / std::pow(static_cast<double>(k), 1.5);

  double acc = 0.0;
  if (std::isfinite(tvals[1])) {
    for (int n = 1; n <= N; ++n)
      acc += detail::condition_weight(id, n, b) * tvals[n] * tvals[n];
  } else {
    acc = std::numeric_limits<double>::infinity();
  }
  rep.partial_sum = acc;
  rep.tail_bound = std::numeric_limits<double>::infinity();

  // dyadic partial sums of the averaged condition, for the report
  if (id == ConditionId::MWAve && std::isfinite(tvals[1])) {
    double dyadic = 0.0;
    for (int r = 0; (1 << r) <= N; ++r) dyadic += tvals[1 << r] * tvals[1 << r];
    rep.note += "; dyadic partial sum " + std::to_string(dyadic);
  }
  return rep;
}

// The dyadic form of the averaged condition on a data profile:
// sum_r (T_{2^r})^2. Both forms must produce the same verdict.
inline ConditionReport check_mwave_dyadic(const ProjectiveProfile& prof) {
  ConditionReport rep;
  rep.id = ConditionId::MWAve;
  rep.N = prof.size();
  double acc = 0.0;
  for (int r = 0; (1 << r) <= prof.size(); ++r) {
    const double t = tail_rest_sum(prof, 1 << r);
    if (!std::isfinite(t)) {
      rep.partial_sum = std::numeric_limits<double>::infinity();
      rep.tail_bound = std::numeric_limits<double>::infinity();
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
    acc += t * t;
  }
  rep.partial_sum = acc;
  if (prof.tail.kind == NormTail::Kind::Bounded) {
    // T_{2^r}^2 <= 8 c^2 2^{-r} beyond the profile: geometric remainder
    const double c = prof.tail.c;
    int r0 = 0;
    while ((1 << r0) <= prof.size()) ++r0;
    rep.tail_bound = 16.0 * c * c * std::pow(2.0, -r0);
    rep.verdict = Verdict::ConvergesUnderModel;
  } else {
    rep.tail_bound = std::numeric_limits<double>::infinity();
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace martlab::projective
