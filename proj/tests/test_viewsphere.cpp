#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "viewpair/errors.hpp"
#include "viewpair/viewsphere.hpp"

using namespace viewpair;

namespace {

const GridSpec kGrid{};

// Naive recursive walk counter used as an oracle for enumerate_paths.
std::size_t count_walks(const GridSpec& grid, ViewIndex v, int steps) {
  if (steps == 0) return 1;
  std::size_t n = 0;
  for (int da = -1; da <= 1; ++da) {
    for (int de = -1; de <= 1; ++de) {
      if (da == 0 && de == 0) continue;
      const int e = v.elevation + de;
      if (e < 0 || e >= grid.elevation_steps) continue;
      const int a = (v.azimuth + da + grid.azimuth_steps) % grid.azimuth_steps;
      n += count_walks(grid, {a, e}, steps - 1);
    }
  }
  return n;
}

}  // namespace

TEST_CASE("interior and boundary neighbour sets") {
  CHECK(neighbors(kGrid, {3, 2}).size() == 8);
  const auto got = neighbors(kGrid, {0, 4});
  const std::set<ViewIndex> expected{{11, 4}, {1, 4}, {11, 3}, {0, 3}, {1, 3}};
  CHECK(got.size() == 5);
  CHECK(std::set<ViewIndex>(got.begin(), got.end()) == expected);
  CHECK(std::is_sorted(got.begin(), got.end()));
  CHECK_THROWS_AS(neighbors(kGrid, {12, 0}), ContractViolation);
  CHECK_THROWS_AS(neighbors(kGrid, {0, -1}), ContractViolation);
}

TEST_CASE("neighbour relation is symmetric and never self") {
  for (const ViewIndex& v : all_views(kGrid)) {
    for (const ViewIndex& u : neighbors(kGrid, v)) {
      CHECK(u != v);
      CHECK(adjacent(kGrid, u, v));
      const auto back = neighbors(kGrid, u);
      CHECK(std::find(back.begin(), back.end(), v) != back.end());
    }
  }
}

TEST_CASE("relative pose examples") {
  CHECK(relative_pose(kGrid, {5, 2}, {5, 2}) == RelativePose{0, 0});
  CHECK(relative_pose(kGrid, {11, 2}, {0, 2}) == RelativePose{1, 0});
  CHECK(relative_pose(kGrid, {0, 0}, {6, 4}) == RelativePose{6, 4});
  CHECK(relative_pose(kGrid, {6, 4}, {0, 0}) == RelativePose{6, -4});
}

TEST_CASE("relative pose azimuth is the minimal wrap candidate") {
  for (const ViewIndex& a : all_views(kGrid)) {
    for (const ViewIndex& b : all_views(kGrid)) {
      const RelativePose p = relative_pose(kGrid, a, b);
      int best = 1000;
      for (int k = -2; k <= 2; ++k) {
        const int d = b.azimuth - a.azimuth + k * kGrid.azimuth_steps;
        best = std::min(best, std::abs(d));
      }
      CHECK(std::abs(p.d_azimuth) == best);
      CHECK(p.d_elevation == b.elevation - a.elevation);
      const auto landed = apply_pose(kGrid, a, p);
      REQUIRE(landed.has_value());
      CHECK(*landed == b);
    }
  }
}

TEST_CASE("apply pose examples") {
  CHECK(apply_pose(kGrid, {0, 2}, {0, 0}) == ViewIndex{0, 2});
  CHECK(apply_pose(kGrid, {11, 2}, {1, 0}) == ViewIndex{0, 2});
  CHECK_FALSE(apply_pose(kGrid, {3, 4}, {0, 1}).has_value());
}

TEST_CASE("realisable poses cover every pair of views") {
  const auto poses = realisable_poses(kGrid);
  CHECK(std::is_sorted(poses.begin(), poses.end()));
  // 12 azimuth offsets (-5..+6) times 9 elevation offsets (-4..+4).
  CHECK(poses.size() == 12 * 9);
  std::set<RelativePose> seen;
  for (const ViewIndex& a : all_views(kGrid))
    for (const ViewIndex& b : all_views(kGrid)) seen.insert(relative_pose(kGrid, a, b));
  CHECK(seen == std::set<RelativePose>(poses.begin(), poses.end()));
}

TEST_CASE("enumerate paths") {
  const auto zero = enumerate_paths(kGrid, {3, 2}, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == Path{{3, 2}});
  CHECK(enumerate_paths(kGrid, {3, 2}, 1).size() == 8);
  for (const ViewIndex start : {ViewIndex{3, 2}, ViewIndex{0, 4}, ViewIndex{11, 0}}) {
    for (int steps = 0; steps <= 4; ++steps) {
      const auto paths = enumerate_paths(kGrid, start, steps);
      CHECK(paths.size() == count_walks(kGrid, start, steps));
      std::set<Path> distinct(paths.begin(), paths.end());
      CHECK(distinct.size() == paths.size());
      for (const Path& p : paths) {
        REQUIRE(p.size() == static_cast<std::size_t>(steps) + 1);
        CHECK(p.front() == start);
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(adjacent(kGrid, p[i - 1], p[i]));
      }
    }
  }
  CHECK_THROWS_AS(enumerate_paths(kGrid, {3, 2}, 9), HorizonExceeded);
  CHECK_THROWS_AS(enumerate_paths(kGrid, {3, 2}, 4, 3), HorizonExceeded);
}

TEST_CASE("straight paths") {
  const Path ring = straight_path(kGrid, {0, 2}, {1, 0}, 11);
  REQUIRE(ring.size() == 12);
  std::set<int> az;
  for (const ViewIndex& v : ring) {
    CHECK(v.elevation == 2);
    az.insert(v.azimuth);
  }
  CHECK(az.size() == 12);

  CHECK(straight_path(kGrid, {0, 4}, {0, 1}, 2) == Path{{0, 4}, {0, 3}, {0, 2}});

  const Path diag = straight_path(kGrid, {0, 0}, {1, 1}, 8);
  std::vector<int> elev;
  for (const ViewIndex& v : diag) elev.push_back(v.elevation);
  CHECK(elev == std::vector<int>{0, 1, 2, 3, 4, 3, 2, 1, 0});
  for (std::size_t i = 1; i < diag.size(); ++i) CHECK(adjacent(kGrid, diag[i - 1], diag[i]));

  CHECK_THROWS_AS(straight_path(kGrid, {0, 0}, {0, 0}, 3), ContractViolation);
  CHECK_THROWS_AS(straight_path(kGrid, {0, 0}, {2, 0}, 3), ContractViolation);
}

TEST_CASE("random paths") {
  Rng rng(7);
  CHECK(random_path(rng, kGrid, {3, 2}, 0) == Path{{3, 2}});

  Rng a(42), b(42);
  CHECK(random_path(a, kGrid, {5, 1}, 20) == random_path(b, kGrid, {5, 1}, 20));

  Rng walk(3);
  const Path p = random_path(walk, kGrid, {0, 0}, 50);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(adjacent(kGrid, p[i - 1], p[i]));

  Rng mc(2024);
  std::map<ViewIndex, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[random_path(mc, kGrid, {3, 2}, 1)[1]];
  CHECK(counts.size() == 8);
  for (const auto& [v, c] : counts) CHECK(std::abs(c / double(n) - 0.125) <= 0.02);
}

TEST_CASE("view graph mirrors neighbours") {
  const ViewGraph graph(kGrid);
  for (const ViewIndex& v : all_views(kGrid)) {
    std::vector<int> expected;
    for (const ViewIndex& u : neighbors(kGrid, v)) expected.push_back(kGrid.linear(u));
    CHECK(graph.neighbors(kGrid.linear(v)) == expected);
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((GridSpec{2, 5}.validate()), ContractViolation);
  CHECK_THROWS_AS((GridSpec{12, 0}.validate()), ContractViolation);
  CHECK_NOTHROW((GridSpec{12, 1}.validate()));
  const GridSpec flat{8, 1};
  CHECK(neighbors(flat, {0, 0}).size() == 2);
  for (int i = 0; i < kGrid.size(); ++i) CHECK(kGrid.linear(kGrid.view_at(i)) == i);
}
