#include "viewpair/viewsphere.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "viewpair/errors.hpp"

namespace viewpair {

namespace {

int wrap(int value, int modulus) {
  const int r = value % modulus;
  return r < 0 ? r + modulus : r;
}

// Shortest signed representative of `delta` modulo `steps`; ties go positive.
int shortest_wrap(int delta, int steps) {
  int d = wrap(delta, steps);
  if (2 * d > steps) d -= steps;
  return d;
}

void require_in_grid(const GridSpec& grid, ViewIndex v) {
  if (!grid.contains(v)) {
    throw ContractViolation("view (" + std::to_string(v.azimuth) + "," +
                            std::to_string(v.elevation) + ") outside the " +
                            std::to_string(grid.azimuth_steps) + "x" +
                            std::to_string(grid.elevation_steps) + " grid");
  }
}

bool is_unit_step(RelativePose d) {
  return d.d_azimuth >= -1 && d.d_azimuth <= 1 && d.d_elevation >= -1 &&
         d.d_elevation <= 1 && !(d.d_azimuth == 0 && d.d_elevation == 0);
}

}  // namespace

void GridSpec::validate() const {
  if (azimuth_steps < 3) throw ContractViolation("azimuth_steps must be at least 3");
  if (elevation_steps < 1) throw ContractViolation("elevation_steps must be at least 1");
}

std::vector<ViewIndex> all_views(const GridSpec& grid) {
  std::vector<ViewIndex> views;
  views.reserve(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) views.push_back(grid.view_at(i));
  return views;
}

std::vector<ViewIndex> neighbors(const GridSpec& grid, ViewIndex v) {
  require_in_grid(grid, v);
  std::vector<ViewIndex> out;
  out.reserve(8);
  for (int da = -1; da <= 1; ++da) {
    for (int de = -1; de <= 1; ++de) {
      if (da == 0 && de == 0) continue;
      const int e = v.elevation + de;
      if (e < 0 || e >= grid.elevation_steps) continue;
      out.push_back({wrap(v.azimuth + da, grid.azimuth_steps), e});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool adjacent(const GridSpec& grid, ViewIndex a, ViewIndex b) {
  const RelativePose d = relative_pose(grid, a, b);
  return is_unit_step(d);
}

RelativePose relative_pose(const GridSpec& grid, ViewIndex a, ViewIndex b) {
  require_in_grid(grid, a);
  require_in_grid(grid, b);
  return {shortest_wrap(b.azimuth - a.azimuth, grid.azimuth_steps),
          b.elevation - a.elevation};
}

RelativePose inverse(const GridSpec& grid, RelativePose pose) {
  return {shortest_wrap(-pose.d_azimuth, grid.azimuth_steps), -pose.d_elevation};
}

std::optional<ViewIndex> apply_pose(const GridSpec& grid, ViewIndex v, RelativePose pose) {
  require_in_grid(grid, v);
  const int e = v.elevation + pose.d_elevation;
  if (e < 0 || e >= grid.elevation_steps) return std::nullopt;
  return ViewIndex{wrap(v.azimuth + pose.d_azimuth, grid.azimuth_steps), e};
}

std::vector<RelativePose> realisable_poses(const GridSpec& grid) {
  std::set<RelativePose> poses;
  const ViewIndex origin{0, 0};
  // Azimuth offsets are translation invariant, so pairing every view with
  // every view of column 0 covers all elevation combinations.
  for (int e0 = 0; e0 < grid.elevation_steps; ++e0) {
    for (const ViewIndex& b : all_views(grid)) {
      poses.insert(relative_pose(grid, {origin.azimuth, e0}, b));
    }
  }
  return {poses.begin(), poses.end()};
}

std::vector<Path> enumerate_paths(const GridSpec& grid, ViewIndex start, int steps,
                                  int horizon_cap) {
  require_in_grid(grid, start);
  require(steps >= 0, "enumerate_paths: steps must be non-negative");
  if (steps > horizon_cap) {
    throw HorizonExceeded("enumerate_paths: " + std::to_string(steps) +
                          " steps exceeds the horizon cap of " +
                          std::to_string(horizon_cap));
  }
  const ViewGraph graph(grid);
  std::vector<Path> out;
  std::vector<int> stack{grid.linear(start)};
  // Explicit DFS over the walk tree with a per-depth child cursor.
  std::vector<std::size_t> cursor{0};
  while (!stack.empty()) {
    if (static_cast<int>(stack.size()) == steps + 1) {
      Path p;
      p.reserve(stack.size());
      for (int idx : stack) p.push_back(grid.view_at(idx));
      out.push_back(std::move(p));
      stack.pop_back();
      cursor.pop_back();
      continue;
    }
    const auto& adj = graph.neighbors(stack.back());
    std::size_t& next = cursor.back();
    if (next == adj.size()) {
      stack.pop_back();
      cursor.pop_back();
      continue;
    }
    stack.push_back(adj[next++]);
    cursor.push_back(0);
  }
  return out;
}

std::vector<RelativePose> unit_directions() {
  std::vector<RelativePose> dirs;
  for (int da = -1; da <= 1; ++da)
    for (int de = -1; de <= 1; ++de)
      if (da != 0 || de != 0) dirs.push_back({da, de});
  return dirs;
}

Path straight_path(const GridSpec& grid, ViewIndex start, RelativePose direction,
                   int steps) {
  require_in_grid(grid, start);
  require(is_unit_step(direction), "straight_path: direction must be a non-zero unit step");
  require(steps >= 0, "straight_path: steps must be non-negative");
  Path path{start};
  ViewIndex v = start;
  RelativePose dir = direction;
  for (int i = 0; i < steps; ++i) {
    auto next = apply_pose(grid, v, dir);
    if (!next) {
      dir.d_elevation = -dir.d_elevation;
      next = apply_pose(grid, v, dir);
      // Single-row grid: elevation motion is impossible in either direction.
      if (!next) {
        dir.d_elevation = 0;
        next = apply_pose(grid, v, dir);
      }
    }
    v = *next;
    path.push_back(v);
  }
  return path;
}

Path random_path(Rng& rng, const GridSpec& grid, ViewIndex start, int steps) {
  require_in_grid(grid, start);
  require(steps >= 0, "random_path: steps must be non-negative");
  Path path{start};
  ViewIndex v = start;
  for (int i = 0; i < steps; ++i) {
    const auto nbrs = neighbors(grid, v);
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    v = nbrs[pick(rng)];
    path.push_back(v);
  }
  return path;
}

ViewGraph::ViewGraph(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  adjacency_.resize(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) {
    for (const ViewIndex& n : viewpair::neighbors(grid, grid.view_at(i))) {
      adjacency_[static_cast<std::size_t>(i)].push_back(grid.linear(n));
    }
  }
}

}  // namespace viewpair
