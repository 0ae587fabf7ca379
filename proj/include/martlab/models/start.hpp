// start.hpp - initial-condition descriptors and sampled-path ensembles
// shared by all process models.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include <martlab/rng.hpp>

namespace martlab::models {

enum class StartKind { Stationary, Quenched };

// Initial condition for a path. Exactly one payload is meaningful per model:
// finite chains use `state`, shifts use `value` (Y0), linear processes use
// `history` (the last J innovations, oldest first).
struct Start {
  StartKind kind = StartKind::Stationary;
  int state = -1;
  double value = 0.0;
  std::vector<double> history;

  static Start stationary() { return {}; }
  static Start at_state(int s) {
    Start st;
    st.kind = StartKind::Quenched;
    st.state = s;
    return st;
  }
  static Start at_value(double y0) {
    Start st;
    st.kind = StartKind::Quenched;
    st.value = y0;
    return st;
  }
  static Start with_history(std::vector<double> h) {
    Start st;
    st.kind = StartKind::Quenched;
    st.history = std::move(h);
    return st;
  }
};

// A materialized ensemble of observable paths. Regenerating with the same
// master seed yields identical rows regardless of thread count, because row i
// is always drawn from substream i.
struct PathEnsemble {
  std::vector<std::vector<double>> paths;  // n_paths x horizon
  Start start;
  std::uint64_t master_seed = 0;
};

// Runs fn(path_index, path) for every path of the ensemble, parallelized over
// contiguous blocks of path indices. fn must only write to per-path slots.
template <class Model, class Fn>
void for_each_path(const Model& model, std::uint64_t master_seed, int n_paths,
                   int horizon, const Start& start, int threads, Fn&& fn) {
  if (n_paths <= 0) throw std::invalid_argument("for_each_path: n_paths must be >= 1");
  if (horizon <= 0) throw std::invalid_argument("for_each_path: horizon must be >= 1");
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < n_paths; ++i) {
      RngStream rs(master_seed, static_cast<std::uint64_t>(i));
      fn(i, model.sample_path(rs, horizon, start));
    }
    return;
  }
  std::vector<std::thread> pool;
  const int block = (n_paths + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * block;
    const int hi = std::min(n_paths, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (int i = lo; i < hi; ++i) {
        RngStream rs(master_seed, static_cast<std::uint64_t>(i));
        fn(i, model.sample_path(rs, horizon, start));
      }
    });
  }
  for (auto& th : pool) th.join();
}

template <class Model>
PathEnsemble make_ensemble(const Model& model, std::uint64_t master_seed, int n_paths,
                           int horizon, const Start& start, int threads = 1) {
  PathEnsemble ens;
  ens.paths.assign(n_paths, {});
  ens.start = start;
  ens.master_seed = master_seed;
  for_each_path(model, master_seed, n_paths, horizon, start, threads,
                [&](int i, const auto& path) { ens.paths[i] = path.x; });
  return ens;
}

}  // namespace martlab::models
