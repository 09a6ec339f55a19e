#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "viewpair/errors.hpp"
#include "viewpair/policy.hpp"

namespace viewpair {

EpisodeState::EpisodeState(const GridSpec& grid)
    : grid_(grid),
      visited_mask_(static_cast<std::size_t>(grid.size()), 0),
      g_(static_cast<std::size_t>(grid.size()), 0.0) {
  grid_.validate();
}

std::size_t EpisodeState::idx(ViewIndex v) const {
  require(grid_.contains(v), "EpisodeState: view outside grid");
  return static_cast<std::size_t>(grid_.linear(v));
}

ViewIndex EpisodeState::current() const {
  require(!visited_.empty(), "EpisodeState: no view observed yet");
  return visited_.back();
}

void EpisodeState::add_observation(ViewIndex v, std::vector<double> quality) {
  const std::size_t i = idx(v);
  require(!visited_mask_[i], "update_costs: view already visited");
  require(quality.size() == g_.size(), "update_costs: quality row has wrong length");
  visited_.push_back(v);
  visited_mask_[i] = 1;
  g_[i] = 0.0;
  for (std::size_t u = 0; u < g_.size(); ++u) {
    if (!visited_mask_[u]) g_[u] += quality[u];
  }
  contributions_.push_back(std::move(quality));
}

void EpisodeState::observe(const Observation& obs, const QualityPredictor& predictor) {
  require(predictor.grid() == grid_, "update_costs: predictor grid differs from episode grid");
  const auto h = predictor.predict(obs);
  std::vector<double> q(h.size());
  std::transform(h.begin(), h.end(), q.begin(), pair_quality);
  add_observation(obs.view, std::move(q));
}

std::vector<double> EpisodeState::recompute_g() const {
  std::vector<double> g(g_.size(), 0.0);
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (visited_mask_[u]) continue;
    for (const auto& q : contributions_) g[u] += q[u];
  }
  return g;
}

EpisodeState update_costs(EpisodeState state, const Observation& obs,
                          const QualityPredictor& predictor) {
  state.observe(obs, predictor);
  return state;
}

double score_trajectory(const EpisodeState& state, const Path& path) {
  const GridSpec& grid = state.grid();
  std::vector<int> unobserved;
  for (const ViewIndex& v : path) {
    require(grid.contains(v), "score_trajectory: view outside grid");
    const int i = grid.linear(v);
    if (!state.is_visited(i)) unobserved.push_back(i);
  }
  std::sort(unobserved.begin(), unobserved.end());
  unobserved.erase(std::unique(unobserved.begin(), unobserved.end()), unobserved.end());
  double s = 0.0;
  for (int i : unobserved) s += state.g_table()[static_cast<std::size_t>(i)];
  return s;
}

namespace {

// Depth-first search over walks with branch-and-bound. Leaf scores are summed
// over the sorted distinct view set, so they are bit-identical to
// score_trajectory on the same walk.
class WalkSearch {
 public:
  WalkSearch(const EpisodeState& state, const ViewGraph& graph, int depth)
      : state_(state), graph_(graph), g_(state.g_table()), depth_(depth) {
    // top_[r] bounds what r further moves can add: the r largest g values.
    std::vector<double> values;
    for (std::size_t i = 0; i < g_.size(); ++i)
      if (!state.is_visited(static_cast<int>(i))) values.push_back(g_[i]);
    std::sort(values.begin(), values.end(), std::greater<>());
    top_.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int r = 1; r <= depth; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      top_[ur] = top_[ur - 1] + (ur - 1 < values.size() ? values[ur - 1] : 0.0);
    }
  }

  // Best walk score from `start`, exact whenever it can reach `floor`.
  double best_from(int start, double floor) {
    floor_ = floor;
    best_ = -std::numeric_limits<double>::infinity();
    count_ = 0;
    push(start);
    descend(start, depth_, state_.is_visited(start) ? 0.0 : g_[static_cast<std::size_t>(start)]);
    pop(start);
    return best_;
  }

 private:
  void push(int v) {
    if (state_.is_visited(v)) {
      added_[pos_++] = false;
      return;
    }
    const bool fresh = std::find(views_.begin(), views_.begin() + count_, v) ==
                       views_.begin() + count_;
    if (fresh) views_[static_cast<std::size_t>(count_++)] = v;
    added_[pos_++] = fresh;
  }

  void pop(int) {
    if (added_[--pos_]) --count_;
  }

  double leaf_score() const {
    std::array<int, kMaxViews> sorted{};
    std::copy(views_.begin(), views_.begin() + count_, sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + count_);
    double s = 0.0;
    for (int i = 0; i < count_; ++i) s += g_[static_cast<std::size_t>(sorted[static_cast<std::size_t>(i)])];
    return s;
  }

  void descend(int node, int remaining, double running) {
    if (remaining == 0) {
      best_ = std::max(best_, leaf_score());
      return;
    }
    const double bound = running + top_[static_cast<std::size_t>(remaining)];
    const double target = std::max(floor_, best_);
    // Slack keeps walks whose exact score ties the incumbent.
    if (bound < target - 1e-9 * std::max(1.0, std::abs(target))) return;
    for (int next : graph_.neighbors(node)) {
      push(next);
      const double gain = added_[pos_ - 1] ? g_[static_cast<std::size_t>(next)] : 0.0;
      descend(next, remaining - 1, running + gain);
      pop(next);
    }
  }

  static constexpr std::size_t kMaxViews = 64;

  const EpisodeState& state_;
  const ViewGraph& graph_;
  const std::vector<double>& g_;
  int depth_;
  std::vector<double> top_;
  std::array<int, kMaxViews> views_{};
  std::array<bool, kMaxViews> added_{};
  int count_ = 0;
  std::size_t pos_ = 0;
  double floor_ = 0.0;
  double best_ = 0.0;
};

}  // namespace

std::optional<NextView> optimised_next(const EpisodeState& state, int remaining_steps,
                                       int horizon_cap) {
  require(remaining_steps >= 1, "optimised_next: remaining_steps must be at least 1");
  require(horizon_cap >= 0 && horizon_cap < 63, "optimised_next: horizon cap out of range");
  if (state.num_unvisited() == 0) return std::nullopt;
  const GridSpec& grid = state.grid();
  const ViewGraph graph(grid);
  const int depth = std::min(remaining_steps - 1, horizon_cap);

  std::optional<NextView> choice;
  WalkSearch search(state, graph, depth);
  for (const ViewIndex& u : neighbors(grid, state.current())) {
    const int ui = grid.linear(u);
    if (state.is_visited(ui)) continue;
    const double floor = choice ? choice->score : -std::numeric_limits<double>::infinity();
    const double s = search.best_from(ui, floor);
    // Neighbours arrive in lexicographic order, so only a strict gain wins.
    if (!choice || s > choice->score) choice = NextView{u, s, false};
  }
  if (choice) return choice;

  for (const ViewIndex& u : all_views(grid)) {
    if (state.is_visited(u)) continue;
    if (!choice || state.g(u) > choice->score) choice = NextView{u, state.g(u), true};
  }
  return choice;
}

}  // namespace viewpair
