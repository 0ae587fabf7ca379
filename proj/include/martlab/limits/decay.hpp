// decay.hpp - almost-sure decay surrogates for the normalized rest
// S_n - M_n: per-path traces at log-spaced checkpoints with a quartile
// envelope verdict (the last-quarter maximum must fall below the
// first-quarter maximum on at least the required fraction of paths).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <martlab/coupling/coupling.hpp>
#include <martlab/models/start.hpp>
#include <martlab/projective/conditions.hpp>
#include <martlab/series.hpp>

namespace martlab::limits {

enum class DecayMode {
  RootN,        // (S_n - M_n) / sqrt(n)
  RootNBStar,   // (S_n - M_n) / sqrt(n b_n^*)
  RootNLogLog,  // (S_n - M_n) / sqrt(n loglog n)
  Averaged      // (1/n) sum_{k<=n} |S_k - M_k| / sqrt(k)
};

inline std::string to_string(DecayMode mode) {
  switch (mode) {
    case DecayMode::RootN: return "root_n";
    case DecayMode::RootNBStar: return "root_n_bstar";
    case DecayMode::RootNLogLog: return "root_n_loglog";
    case DecayMode::Averaged: return "averaged";
  }
  return "?";
}

struct DecayReport {
  DecayMode mode = DecayMode::RootN;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> mean_abs;   // ensemble mean |statistic| per checkpoint
  double pass_fraction = 0.0;     // paths whose envelope decays
  bool passes = false;
  double required_fraction = 0.95;
};

namespace detail {

inline bool envelope_decays(const std::vector<double>& abs_values) {
  const std::size_t q = std::max<std::size_t>(1, abs_values.size() / 4);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < q; ++i) first = std::max(first, abs_values[i]);
  for (std::size_t i = abs_values.size() - q; i < abs_values.size(); ++i)
    last = std::max(last, abs_values[i]);
  return last < first;
}

}  // namespace detail

struct DecayOptions {
  int n_paths = 256;
  std::uint64_t seed = 99;
  int threads = 1;
  double required_fraction = 0.95;
  SlowlyVaryingSeq b;  // used by the b-star normalizer
};

template <class Model>
DecayReport rest_decay_diag(const Model& model, DecayMode mode,
                            const std::vector<std::uint64_t>& checkpoints,
                            const DecayOptions& opt = {}) {
  if (checkpoints.size() < 4)
    throw std::invalid_argument("rest_decay_diag: need at least 4 checkpoints");
  const auto horizon = static_cast<int>(checkpoints.back());
  const auto kit = model.coupling_kit(coupling::kLimitWindow);
  const auto bstar = b_star_prefix(checkpoints.back(), opt.b);

  std::vector<std::vector<double>> traces(opt.n_paths,
                                          std::vector<double>(checkpoints.size(), 0.0));
  models::for_each_path(
      model, opt.seed, opt.n_paths, horizon, models::Start::stationary(), opt.threads,
      [&](int i, const auto& path) {
        double s = 0.0, mart = 0.0, averaged_acc = 0.0;
        std::size_t ci = 0;
        for (int k = 1; k <= horizon; ++k) {
          s += path.x[k - 1];
          mart += kit.d_at(path, k - 1);
          const double rest = s - mart;
          averaged_acc += std::abs(rest) / std::sqrt(static_cast<double>(k));
          if (ci < checkpoints.size() && checkpoints[ci] == static_cast<std::uint64_t>(k)) {
            double stat = 0.0;
            const double kk = static_cast<double>(k);
            switch (mode) {
              case DecayMode::RootN: stat = rest / std::sqrt(kk); break;
              case DecayMode::RootNBStar:
                stat = rest / std::sqrt(kk * bstar[k - 1]);
                break;
              case DecayMode::RootNLogLog:
                stat = rest / std::sqrt(kk * loglog_clamped(kk));
                break;
              case DecayMode::Averaged: stat = averaged_acc / kk; break;
            }
            traces[i][ci] = stat;
            ++ci;
          }
        }
      });

  DecayReport rep;
  rep.mode = mode;
  rep.checkpoints = checkpoints;
  rep.required_fraction = opt.required_fraction;
  rep.mean_abs.assign(checkpoints.size(), 0.0);
  int passed = 0;
  for (int i = 0; i < opt.n_paths; ++i) {
    std::vector<double> abs_trace(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      abs_trace[c] = std::abs(traces[i][c]);
      rep.mean_abs[c] += abs_trace[c] / opt.n_paths;
    }
    if (detail::envelope_decays(abs_trace)) ++passed;
  }
  rep.pass_fraction = static_cast<double>(passed) / opt.n_paths;
  rep.passes = rep.pass_fraction >= opt.required_fraction;
  return rep;
}

// Decay of (S_n - M_n)/sqrt(n b_n^*) conditional on the square-summability
// premise  sum_n b_n ||S_n - M_n||^2 / n^2 < inf,  evaluated on the rest
// norms with their declared tail.
struct CunyCheckResult {
  bool premise_holds = false;
  double premise_partial = 0.0;
  double premise_tail_bound = 0.0;
  DecayReport decay;
  std::string note;
};

template <class Model>
CunyCheckResult cuny_normalization_check(const Model& model, const SlowlyVaryingSeq& b,
                                         const std::vector<std::uint64_t>& checkpoints,
                                         const projective::NormTail& rest_tail,
                                         const DecayOptions& opt_in = {}) {
  CunyCheckResult out;
  const int n_probe = 256;

  // premise partial sums on exact rest norms where available
  double acc = 0.0;
  bool have_exact = true;
  for (int n = 1; n <= n_probe; ++n) {
    const auto exact = coupling::exact_limit_rest_norm(model, n);
    if (!exact) {
      have_exact = false;
      break;
    }
    acc += b(n) * (*exact) * (*exact) / (static_cast<double>(n) * n);
  }
  out.premise_partial = acc;
  if (!have_exact) {
    out.note = "rest norms not exactly computable; premise left to the declared tail";
  }
  switch (rest_tail.kind) {
    case projective::NormTail::Kind::Bounded: {
      // remainder <= c^2 sum_{n>probe} b_n / n^2, summed explicitly plus a
      // sqrt-domination overshoot
      double tail = 0.0;
      const std::uint64_t M = 1u << 20;
      for (std::uint64_t n = n_probe + 1; n <= M; ++n)
        tail += b(n) / (static_cast<double>(n) * n);
      tail += 2.0 * b(M) / static_cast<double>(M);
      out.premise_tail_bound = rest_tail.c * rest_tail.c * tail;
      out.premise_holds = true;
      break;
    }
    default:
      out.premise_tail_bound = std::numeric_limits<double>::infinity();
      out.premise_holds = false;
      out.note += (out.note.empty() ? "" : "; ");
      out.note += "premise_failed: no summable model for the rest norms";
      break;
  }

  if (out.premise_holds) {
    DecayOptions opt = opt_in;
    opt.b = b;
    out.decay = rest_decay_diag(model, DecayMode::RootNBStar, checkpoints, opt);
  }
  return out;
}

}  // namespace martlab::limits
