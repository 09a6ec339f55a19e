#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance binary. They favour directness over speed.

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "viewpair/policy.hpp"
#include "viewpair/sensorium.hpp"
#include "viewpair/viewsphere.hpp"

namespace viewpair::oracle {

// Normalised product of per-dimension Gaussian densities, evaluated in the
// linear domain class by class.
inline std::vector<double> gaussian_posterior(const SyntheticWorld& w,
                                              const std::vector<Observation>& obs) {
  const double s = w.noise_sigma();
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> p(static_cast<std::size_t>(w.num_classes()), 1.0);
  for (Label k = 0; k < w.num_classes(); ++k) {
    for (const Observation& o : obs) {
      const auto mu = w.signature(k, o.view);
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double z = (o.features[j] - mu[j]) / s;
        p[static_cast<std::size_t>(k)] *= norm * std::exp(-0.5 * z * z);
      }
    }
  }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return p;
}

// Lists every walk from every unvisited neighbour, scores it, keeps the
// first maximum in neighbour order.
inline std::optional<ViewIndex> brute_force_next(const EpisodeState& state, int remaining,
                                                 int horizon_cap) {
  const GridSpec& grid = state.grid();
  const int depth = std::min(remaining - 1, horizon_cap);
  std::optional<ViewIndex> best;
  double best_score = 0.0;
  for (const ViewIndex& u : neighbors(grid, state.current())) {
    if (state.is_visited(u)) continue;
    double top = -1.0;
    for (const Path& t : enumerate_paths(grid, u, depth)) top = std::max(top, score_trajectory(state, t));
    if (!best || top > best_score) {
      best = u;
      best_score = top;
    }
  }
  if (best) return best;
  for (const ViewIndex& u : all_views(grid)) {
    if (state.is_visited(u)) continue;
    if (!best || state.g(u) > best_score) {
      best = u;
      best_score = state.g(u);
    }
  }
  return best;
}

// A state built from a random walk-with-jumps of `visits` views and random
// quality rows. A few rows are quantised so that exact ties occur.
inline EpisodeState random_state(const GridSpec& grid, Rng& rng, int visits) {
  EpisodeState state(grid);
  std::uniform_real_distribution<double> q(0.0, 1.0);
  std::bernoulli_distribution coarse(0.3);
  std::uniform_int_distribution<int> any(0, grid.size() - 1);
  ViewIndex v = grid.view_at(any(rng));
  for (int i = 0; i < visits; ++i) {
    std::vector<double> row(static_cast<std::size_t>(grid.size()));
    const bool quantise = coarse(rng);
    for (double& x : row) x = quantise ? std::round(4.0 * q(rng)) / 4.0 : q(rng);
    state.add_observation(v, std::move(row));
    if (static_cast<int>(state.visited().size()) == grid.size()) break;
    std::vector<ViewIndex> open;
    for (const ViewIndex& u : neighbors(grid, v))
      if (!state.is_visited(u)) open.push_back(u);
    if (open.empty() || coarse(rng)) {
      for (const ViewIndex& u : all_views(grid))
        if (!state.is_visited(u)) open.push_back(u);
    }
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    v = open[pick(rng)];
  }
  return state;
}

}  // namespace viewpair::oracle
