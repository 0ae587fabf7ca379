// quenched.hpp - distributional checks under a fixed initial condition: the
// law of S_n/sqrt(n) against its normal limit, and path functionals of
// t -> S_{[nt]}/sqrt(n) against their Brownian reference laws. For two-state
// chains the quenched law is computed exactly by dynamic programming over
// (state, visit count).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <martlab/errors.hpp>
#include <martlab/models/markov_chain.hpp>
#include <martlab/models/start.hpp>
#include <martlab/stats.hpp>

namespace martlab::limits {

struct QuenchedLawResult {
  double ks = 0.0;
  int n = 0;
  int n_paths = 0;       // 0 for the exact law
  bool degenerate = false;  // sigma = 0: compared against a point mass
};

namespace detail {

inline std::function<double(double)> normal_or_point_mass(double sigma) {
  if (sigma <= 0.0)
    return [](double x) { return x < 0.0 ? 0.0 : 1.0; };
  return [sigma](double x) { return normal_cdf(x, sigma); };
}

}  // namespace detail

// Monte Carlo law of S_n/sqrt(n) under a fixed start, against N(0, sigma^2).
template <class Model>
QuenchedLawResult quenched_cdf_distance(const Model& model, const models::Start& start,
                                        int n, int n_paths, double sigma,
                                        std::uint64_t seed, int threads = 1) {
  if (n_paths < 1000)
    throw std::invalid_argument("quenched_cdf_distance: need at least 1000 paths");
  std::vector<double> samples(n_paths, 0.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  models::for_each_path(model, seed, n_paths, n, start, threads,
                        [&](int i, const auto& path) {
                          double s = 0.0;
                          for (double v : path.x) s += v;
                          samples[i] = s / root_n;
                        });
  QuenchedLawResult out;
  out.n = n;
  out.n_paths = n_paths;
  out.degenerate = sigma <= 0.0;
  out.ks = ks_distance(std::move(samples), detail::normal_or_point_mass(sigma));
  return out;
}

// Exact quenched law of S_n/sqrt(n) for a two-state chain: S_n is a function
// of the number of visits to state 0, so the DP over (state, count) is exact.
struct ExactQuenchedLaw {
  std::vector<std::pair<double, double>> atoms;  // (value of S_n/sqrt(n), prob)
  double total_mass = 0.0;
  double mean = 0.0;
};

inline ExactQuenchedLaw exact_quenched_law_two_state(const models::FiniteMarkovChain& chain,
                                                     int start_state, int n) {
  if (chain.n_states() != 2)
    throw CapabilityError(
        "exact quenched law: the visit-count representation needs a two-state chain");
  if (n < 1) throw std::invalid_argument("exact quenched law: n >= 1");
  if (start_state < 0 || start_state > 1)
    throw std::domain_error("exact quenched law: start state out of range");
  const auto& q = chain.transition();
  const double f0 = chain.observable()(0), f1 = chain.observable()(1);

  // probs[s][c] = P(xi_i = s, #visits to state 0 among xi_0..xi_i equals c)
  std::vector<std::vector<double>> probs(2, std::vector<double>(n + 1, 0.0));
  probs[start_state][start_state == 0 ? 1 : 0] = 1.0;
  for (int i = 1; i < n; ++i) {
    std::vector<std::vector<double>> next(2, std::vector<double>(n + 1, 0.0));
    for (int s = 0; s < 2; ++s) {
      for (int c = 0; c <= i; ++c) {
        const double p = probs[s][c];
        if (p == 0.0) continue;
        next[0][c + 1] += p * q(s, 0);
        next[1][c] += p * q(s, 1);
      }
    }
    probs.swap(next);
  }

  ExactQuenchedLaw law;
  const double root_n = std::sqrt(static_cast<double>(n));
  law.atoms.reserve(n + 1);
  for (int c = 0; c <= n; ++c) {
    const double p = probs[0][c] + probs[1][c];
    if (p == 0.0) continue;
    const double value = (c * f0 + (n - c) * f1) / root_n;
    law.atoms.push_back({value, p});
    law.total_mass += p;
    law.mean += p * value;
  }
  std::sort(law.atoms.begin(), law.atoms.end());
  return law;
}

inline QuenchedLawResult exact_quenched_ks_two_state(const models::FiniteMarkovChain& chain,
                                                     int start_state, int n, double sigma) {
  auto law = exact_quenched_law_two_state(chain, start_state, n);
  QuenchedLawResult out;
  out.n = n;
  out.degenerate = sigma <= 0.0;
  out.ks = ks_distance_atoms(std::move(law.atoms), detail::normal_or_point_mass(sigma));
  return out;
}

// ----- path functionals of the partial-sum path -----

enum class PathFunctional { Terminal, Integral, Sup, SupAbs };

inline std::string to_string(PathFunctional f) {
  switch (f) {
    case PathFunctional::Terminal: return "terminal";
    case PathFunctional::Integral: return "integral";
    case PathFunctional::Sup: return "sup";
    case PathFunctional::SupAbs: return "sup_abs";
  }
  return "?";
}

inline std::optional<PathFunctional> functional_from_string(const std::string& s) {
  if (s == "terminal") return PathFunctional::Terminal;
  if (s == "integral") return PathFunctional::Integral;
  if (s == "sup") return PathFunctional::Sup;
  if (s == "sup_abs") return PathFunctional::SupAbs;
  return std::nullopt;
}

// Reference law of the functional under Brownian motion with variance sigma^2:
// terminal value is normal, the time integral is normal with variance
// sigma^2/3, the one-sided sup is half-normal, the two-sided sup follows the
// alternating series law.
inline std::function<double(double)> functional_reference_cdf(PathFunctional f,
                                                              double sigma) {
  switch (f) {
    case PathFunctional::Terminal:
      return detail::normal_or_point_mass(sigma);
    case PathFunctional::Integral:
      return detail::normal_or_point_mass(sigma / std::sqrt(3.0));
    case PathFunctional::Sup:
      return [sigma](double x) { return brownian_sup_cdf(x, sigma); };
    case PathFunctional::SupAbs:
      return [sigma](double x) { return brownian_sup_abs_cdf(x, sigma); };
  }
  throw std::invalid_argument("functional_reference_cdf: unregistered functional");
}

template <class Model>
QuenchedLawResult fclt_functional_check(const Model& model, const models::Start& start,
                                        int n, PathFunctional functional, int n_paths,
                                        double sigma, std::uint64_t seed,
                                        int threads = 1) {
  std::vector<double> samples(n_paths, 0.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  models::for_each_path(
      model, seed, n_paths, n, start, threads, [&](int i, const auto& path) {
        double s = 0.0;
        double sup = 0.0, sup_abs = 0.0, integral = 0.0;
        for (int k = 0; k < n; ++k) {
          integral += s;  // S_k held on [k/n, (k+1)/n)
          s += path.x[k];
          sup = std::max(sup, s);
          sup_abs = std::max(sup_abs, std::abs(s));
        }
        switch (functional) {
          case PathFunctional::Terminal: samples[i] = s / root_n; break;
          case PathFunctional::Integral: samples[i] = integral / n / root_n; break;
          case PathFunctional::Sup: samples[i] = sup / root_n; break;
          case PathFunctional::SupAbs: samples[i] = sup_abs / root_n; break;
        }
      });
  QuenchedLawResult out;
  out.n = n;
  out.n_paths = n_paths;
  out.degenerate = sigma <= 0.0;
  out.ks = ks_distance(std::move(samples), functional_reference_cdf(functional, sigma));
  return out;
}

}  // namespace martlab::limits
