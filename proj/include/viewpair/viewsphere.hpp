#pragma once

// Discrete viewing sphere: an azimuth x elevation grid of camera poses at a
// fixed radius. Azimuth wraps; elevation is clamped (no pole vertices).

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "viewpair/rng.hpp"

namespace viewpair {

struct ViewIndex {
  int azimuth = 0;
  int elevation = 0;

  friend auto operator<=>(const ViewIndex&, const ViewIndex&) = default;
};

// Signed step offset between two views. d_azimuth is reduced to the shortest
// wrap distance; the half-turn tie resolves to the positive sign.
struct RelativePose {
  int d_azimuth = 0;
  int d_elevation = 0;

  friend auto operator<=>(const RelativePose&, const RelativePose&) = default;
};

using Path = std::vector<ViewIndex>;

struct GridSpec {
  static constexpr double kStepDegrees = 30.0;

  int azimuth_steps = 12;
  int elevation_steps = 5;

  void validate() const;

  int size() const { return azimuth_steps * elevation_steps; }
  bool contains(ViewIndex v) const {
    return v.azimuth >= 0 && v.azimuth < azimuth_steps && v.elevation >= 0 &&
           v.elevation < elevation_steps;
  }

  // Linear index in lexicographic (azimuth, elevation) order.
  int linear(ViewIndex v) const { return v.azimuth * elevation_steps + v.elevation; }
  ViewIndex view_at(int linear_index) const {
    return {linear_index / elevation_steps, linear_index % elevation_steps};
  }

  double azimuth_degrees(ViewIndex v) const { return v.azimuth * kStepDegrees; }
  // Rows are centred on the equator.
  double elevation_degrees(ViewIndex v) const {
    return (v.elevation - (elevation_steps - 1) / 2.0) * kStepDegrees;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Every view of the grid in linear order.
std::vector<ViewIndex> all_views(const GridSpec& grid);

// Views one step away (including diagonals), sorted lexicographically.
std::vector<ViewIndex> neighbors(const GridSpec& grid, ViewIndex v);
bool adjacent(const GridSpec& grid, ViewIndex a, ViewIndex b);

RelativePose relative_pose(const GridSpec& grid, ViewIndex a, ViewIndex b);
RelativePose inverse(const GridSpec& grid, RelativePose pose);
std::optional<ViewIndex> apply_pose(const GridSpec& grid, ViewIndex v, RelativePose pose);

// All relative poses produced by some pair of grid views, sorted.
std::vector<RelativePose> realisable_poses(const GridSpec& grid);

inline constexpr int kDefaultEnumerationCap = 8;

// Every walk of exactly `steps` adjacency moves from `start`. Revisits are
// allowed. Throws HorizonExceeded above `horizon_cap`.
std::vector<Path> enumerate_paths(const GridSpec& grid, ViewIndex start, int steps,
                                  int horizon_cap = kDefaultEnumerationCap);

// Repeatedly applies a unit `direction`; the elevation component reflects at
// the top and bottom rows.
Path straight_path(const GridSpec& grid, ViewIndex start, RelativePose direction,
                   int steps);

// The eight unit directions in lexicographic order.
std::vector<RelativePose> unit_directions();

Path random_path(Rng& rng, const GridSpec& grid, ViewIndex start, int steps);

// Precomputed adjacency by linear index, for inner loops.
class ViewGraph {
 public:
  explicit ViewGraph(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const std::vector<int>& neighbors(int linear_index) const {
    return adjacency_[static_cast<std::size_t>(linear_index)];
  }

 private:
  GridSpec grid_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace viewpair
