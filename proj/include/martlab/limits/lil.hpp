// lil.hpp - running values of S_n / sqrt(2 n loglog n) along one long path,
// with running extremes tracked continuously between geometric checkpoints.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <martlab/models/start.hpp>
#include <martlab/rng.hpp>
#include <martlab/series.hpp>

namespace martlab::limits {

struct LILCheckpoint {
  std::uint64_t n = 0;
  double statistic = 0.0;    // S_n / sqrt(2 n loglog n)
  double running_max = 0.0;  // extremes of the statistic since tracking began
  double running_min = 0.0;
};

struct LILTrace {
  std::vector<LILCheckpoint> checkpoints;
  std::uint64_t track_from = 0;

  double terminal_running_max_abs() const {
    if (checkpoints.empty()) return 0.0;
    const auto& last = checkpoints.back();
    return std::max(last.running_max, -last.running_min);
  }
};

// Walks a single path of length checkpoints.back() and records the normalized
// statistic. Extremes are tracked at every step from `track_from` on (the
// normalizer is degenerate for tiny n).
template <class Model>
LILTrace lil_trace(const Model& model, const models::Start& start, std::uint64_t seed,
                   std::vector<std::uint64_t> checkpoints,
                   std::uint64_t track_from = 512) {
  if (checkpoints.empty()) throw std::invalid_argument("lil_trace: no checkpoints");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("lil_trace: checkpoints must be strictly increasing");

  LILTrace trace;
  trace.track_from = track_from;
  trace.checkpoints.reserve(checkpoints.size());

  RngStream rs(seed, 0);
  auto stepper = model.stepper(rs, start);
  double s = 0.0;
  double run_max = -std::numeric_limits<double>::infinity();
  double run_min = std::numeric_limits<double>::infinity();
  std::size_t ci = 0;
  const std::uint64_t horizon = checkpoints.back();
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    s += stepper.next(rs);
    double stat = 0.0;
    if (n >= track_from) {
      const double denom =
          std::sqrt(2.0 * static_cast<double>(n) * loglog(static_cast<double>(n)));
      stat = s / denom;
      run_max = std::max(run_max, stat);
      run_min = std::min(run_min, stat);
    }
    if (n == checkpoints[ci]) {
      LILCheckpoint cp;
      cp.n = n;
      cp.statistic = stat;
      cp.running_max = run_max;
      cp.running_min = run_min;
      trace.checkpoints.push_back(cp);
      ++ci;
    }
  }
  return trace;
}

inline std::vector<std::uint64_t> dyadic_checkpoints(int from_exp, int to_exp) {
  std::vector<std::uint64_t> cps;
  for (int e = from_exp; e <= to_exp; ++e) cps.push_back(std::uint64_t{1} << e);
  return cps;
}

}  // namespace martlab::limits
