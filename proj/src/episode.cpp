#include <algorithm>
#include <array>

#include "viewpair/errors.hpp"
#include "viewpair/policy.hpp"

namespace viewpair {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 5> kStrategyNames{{
    {Strategy::Random, "random"},
    {Strategy::Straight, "straight"},
    {Strategy::NbvGlobal, "nbv-global"},
    {Strategy::NbvAdjacent, "nbv-adjacent"},
    {Strategy::Optimised, "optimised"},
}};

std::vector<ViewIndex> unvisited_of(const std::vector<ViewIndex>& candidates,
                                    const std::vector<char>& seen, const GridSpec& grid) {
  std::vector<ViewIndex> out;
  for (const ViewIndex& v : candidates)
    if (!seen[static_cast<std::size_t>(grid.linear(v))]) out.push_back(v);
  return out;
}

ViewIndex pick_uniform(Rng& rng, const std::vector<ViewIndex>& views) {
  std::uniform_int_distribution<std::size_t> pick(0, views.size() - 1);
  return views[pick(rng)];
}

}  // namespace

std::string to_string(Strategy strategy) {
  for (const auto& [s, name] : kStrategyNames)
    if (s == strategy) return std::string(name);
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (const auto& [s, n] : kStrategyNames)
    if (n == name) return s;
  return std::nullopt;
}

std::vector<Strategy> all_strategies() {
  std::vector<Strategy> out;
  for (const auto& entry : kStrategyNames) out.push_back(entry.first);
  return out;
}

Observation episode_observation(const ClassifierOracle& oracle, const ObjectRef& object,
                                ViewIndex v, std::uint64_t observation_seed) {
  Rng rng = make_rng(observation_seed,
                     {stream::kObservation, static_cast<std::uint64_t>(oracle.grid().linear(v))});
  return oracle.observe(object, v, rng);
}

EpisodeResult run_episode(const Models& models, const ObjectRef& object, ViewIndex start,
                          const EpisodeOptions& options, const EpisodeSeeds& seeds,
                          bool keep_states) {
  const GridSpec& grid = models.oracle.grid();
  require(options.views >= 1, "run_episode: need at least one view");
  require(options.views <= grid.size(), "run_episode: more views requested than the grid holds");
  require(grid.contains(start), "run_episode: start view outside grid");
  require(!options.fusions.empty() || options.vote, "run_episode: nothing to classify with");

  Rng path_rng = make_rng(seeds.path, {stream::kPath});
  RelativePose direction{1, 0};
  if (options.strategy == Strategy::Straight) {
    if (options.straight_direction) {
      direction = *options.straight_direction;
    } else {
      const auto dirs = unit_directions();
      std::uniform_int_distribution<std::size_t> pick(0, dirs.size() - 1);
      direction = dirs[pick(path_rng)];
    }
    // Validates the direction.
    (void)straight_path(grid, start, direction, 0);
  }

  EpisodeResult result;
  SequenceRecord record(models.oracle);
  EpisodeState state(grid);
  std::vector<char> seen(static_cast<std::size_t>(grid.size()), 0);
  const auto all = all_views(grid);

  ViewIndex current = start;
  bool jumped = false;
  for (int m = 1;; ++m) {
    Observation obs = episode_observation(models.oracle, object, current, seeds.observation);
    seen[static_cast<std::size_t>(grid.linear(current))] = 1;
    result.path.push_back(current);
    if (m > 1) result.jumped.push_back(jumped);
    if (options.strategy == Strategy::Optimised) {
      state.observe(obs, models.quality);
      if (keep_states) result.states.push_back(state);
    }
    record.append(obs);
    if (m == options.views) break;

    // Choose the next view.
    jumped = false;
    const auto fallback_random = [&] {
      auto open = unvisited_of(neighbors(grid, current), seen, grid);
      if (open.empty()) {
        jumped = true;
        open = unvisited_of(all, seen, grid);
      }
      return pick_uniform(path_rng, open);
    };
    switch (options.strategy) {
      case Strategy::Random:
        current = fallback_random();
        break;
      case Strategy::Straight: {
        auto step = apply_pose(grid, current, direction);
        if (!step) {
          direction.d_elevation = -direction.d_elevation;
          step = apply_pose(grid, current, direction);
        }
        if (!step) {
          direction.d_elevation = 0;
          step = apply_pose(grid, current, direction);
        }
        if (step && *step != current && !seen[static_cast<std::size_t>(grid.linear(*step))]) {
          current = *step;
        } else {
          current = fallback_random();
        }
        break;
      }
      case Strategy::NbvGlobal:
      case Strategy::NbvAdjacent: {
        const NbvMode mode =
            options.strategy == Strategy::NbvGlobal ? NbvMode::Global : NbvMode::Adjacent;
        const auto next = models.nbv.next(obs, mode, result.path);
        require(next.has_value(), "run_episode: no unvisited view left");
        jumped = !adjacent(grid, current, *next);
        current = *next;
        break;
      }
      case Strategy::Optimised: {
        const auto next = optimised_next(state, options.views - m, options.horizon_cap);
        require(next.has_value(), "run_episode: no unvisited view left");
        jumped = next->fallback;
        current = next->view;
        break;
      }
    }
  }

  for (const FusionVariant& f : options.fusions) {
    std::vector<Label> labels;
    labels.reserve(record.size());
    for (std::size_t p = 1; p <= record.size(); ++p)
      labels.push_back(record.classify(&models.weights, f, p).label);
    result.predictions.push_back(std::move(labels));
  }
  if (options.vote) {
    for (std::size_t p = 1; p <= record.size(); ++p) result.votes.push_back(record.vote(p));
  }
  return result;
}

}  // namespace viewpair
