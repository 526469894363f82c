#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "afs/lattice.hpp"
#include "afs/rng.hpp"

using namespace afs;

TEST_CASE("cube_sites basics") {
  auto s1 = cube_sites(CubeSpec{origin(1), 9, -1});
  REQUIRE(s1.size() == 9);
  CHECK(s1.front() == Point{-4});
  CHECK(s1.back() == Point{4});

  auto s2 = cube_sites(CubeSpec{origin(2), 9, -1});
  CHECK(s2.size() == 81);

  auto s3 = cube_sites(CubeSpec{origin(3), 1, -1});
  REQUIRE(s3.size() == 1);
  CHECK(s3[0] == Point{0, 0, 0});

  CHECK_THROWS_AS(cube_sites(CubeSpec{origin(1), 8, -1}), std::invalid_argument);
  CHECK_THROWS_AS(cube_sites(CubeSpec{origin(1), -3, -1}), std::invalid_argument);
}

TEST_CASE("cube_sites are sorted lexicographically and unique") {
  auto s = cube_sites(CubeSpec{Point{2, -1}, 5, -1});
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  CHECK(s.size() == 25);
}

TEST_CASE("core and shell partition the cube") {
  auto cs = core_shell(CubeSpec{origin(1), 9, -1});
  CHECK(cs.core.size == 3);
  auto core_sites = cube_sites(cs.core);
  CHECK(core_sites == std::vector<Point>{{-1}, {0}, {1}});
  CHECK(cs.shell == std::vector<Point>{{-4}, {-3}, {-2}, {2}, {3}, {4}});

  auto cs2 = core_shell(CubeSpec{origin(2), 27, -1});
  CHECK(cube_sites(cs2.core).size() == 81);
  CHECK(cs2.shell.size() == 648);

  auto cs3 = core_shell(CubeSpec{origin(1), 3, -1});
  CHECK(cube_sites(cs3.core) == std::vector<Point>{{0}});
  CHECK(cs3.shell == std::vector<Point>{{-1}, {1}});

  CHECK_THROWS_AS(core_shell(CubeSpec{origin(1), 5, -1}), std::invalid_argument);
}

TEST_CASE("core/shell counts for random cubes") {
  for (int64_t l : {3, 9, 15, 27}) {
    for (int d : {1, 2}) {
      CubeSpec c{origin(d), l, -1};
      auto cs = core_shell(c);
      int64_t core_n = cube_sites(cs.core).size();
      int64_t expect_core = 1;
      for (int i = 0; i < d; ++i) expect_core *= l / 3;
      CHECK(core_n == expect_core);
      CHECK(core_n + static_cast<int64_t>(cs.shell.size()) == c.site_count());
    }
  }
}

TEST_CASE("boundary annulus") {
  CHECK(boundary_annulus(CubeSpec{origin(1), 9, -1}) ==
        std::vector<Point>{{-4}, {-3}, {3}, {4}});
  CHECK(boundary_annulus(CubeSpec{origin(2), 9, -1}).size() == 81 - 25);
  CHECK(boundary_annulus(CubeSpec{origin(1), 5, -1}) ==
        std::vector<Point>{{-2}, {-1}, {1}, {2}});
  CHECK_THROWS_AS(boundary_annulus(CubeSpec{origin(1), 3, -1}), std::invalid_argument);
  // the relaxed variant degenerates to the whole cube
  CHECK(annulus_two_layers(CubeSpec{origin(1), 3, -1}).size() == 3);
}

TEST_CASE("covering centers") {
  CHECK(covering_centers({{0}}, 3) == std::vector<Point>{{0}});

  std::vector<Point> a;
  for (int64_t x = -4; x <= 4; ++x) a.push_back({x});
  CHECK(covering_centers(a, 3) == std::vector<Point>{{-3}, {0}, {3}});

  auto gamma = boundary_annulus(CubeSpec{origin(1), 9, -1});
  CHECK(covering_centers(gamma, 3) == std::vector<Point>{{-3}, {3}});
}

TEST_CASE("covering centers against brute-force cell membership") {
  // every site of A lies in the cell of its reported center, and removing any
  // center uncovers some site
  for (uint64_t trial = 0; trial < 20; ++trial) {
    std::vector<Point> a;
    for (int i = 0; i < 12; ++i) {
      int64_t x = static_cast<int64_t>(counter_uniform(7, trial, i) * 40) - 20;
      int64_t y = static_cast<int64_t>(counter_uniform(8, trial, i) * 40) - 20;
      a.push_back({x, y});
    }
    auto centers = covering_centers(a, 3);
    std::set<Point> cset(centers.begin(), centers.end());
    for (auto& p : a) CHECK(cset.count(cell_center_of(p, 3)) == 1);
    std::set<Point> used;
    for (auto& p : a) used.insert(cell_center_of(p, 3));
    CHECK(used.size() == centers.size());  // minimality
  }
}

TEST_CASE("skeleton of a 27-cube over 3-cells, d=1") {
  auto g = skeleton(CubeSpec{origin(1), 27, -1}, 3);
  REQUIRE(g.vertices.size() == 9);
  CHECK(g.vertices.front() == Point{-12});
  CHECK(g.vertices.back() == Point{12});
  CHECK(g.max_radius == 4);  // R = 3K+1 with Y = 3 -> K = 1
  for (size_t i = 0; i < g.layers.size(); ++i)
    for (int vi : g.layers[i]) CHECK(g.layer_of[vi] == static_cast<int>(i));
}

TEST_CASE("interior admissible centers have 3^d - 1 nearest neighbors") {
  for (int d : {1, 2}) {
    auto g = skeleton(CubeSpec{origin(d), 27, -1}, 3);
    int expect = 1;
    for (int i = 0; i < d; ++i) expect *= 3;
    --expect;
    for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
      // interior vertex: its neighborhood does not touch the cube boundary
      if (norm_max(g.vertices[vi], origin(d)) + 3 > 12) continue;
      CHECK(static_cast<int>(g.edges[vi].size()) == expect);
    }
  }
}

TEST_CASE("single-cell cube skeleton is one vertex") {
  auto g = skeleton(CubeSpec{origin(1), 3, -1}, 3);
  CHECK(g.vertices.size() == 1);
  CHECK(g.max_radius == 0);
}

TEST_CASE("skeleton layer sizes, d=2") {
  auto g = skeleton(CubeSpec{origin(2), 27, -1}, 3);
  REQUIRE(g.vertices.size() == 81);
  REQUIRE(g.layers.size() == 5);
  CHECK(g.layers[0].size() == 1);
  CHECK(g.layers[1].size() == 8);
  CHECK(g.layers[2].size() == 16);
  CHECK(g.layers[3].size() == 24);
  CHECK(g.layers[4].size() == 32);
  // layers partition the vertex set
  size_t total = 0;
  for (auto& l : g.layers) total += l.size();
  CHECK(total == g.vertices.size());
}

TEST_CASE("skeleton radius count matches the concentric-cube reading") {
  // |{r : K <= r <= R-2}| = Y - 1 for a cube of size Y * (3 l)
  for (int64_t y : {3, 9}) {
    auto g = skeleton(CubeSpec{origin(1), y * 9, -1}, 3);
    int64_t kk = (y - 1) / 2;
    CHECK(g.max_radius == 3 * kk + 1);
    int64_t count = (g.max_radius - 2) - kk + 1;
    CHECK(count == y - 1);
  }
  CHECK_THROWS_AS(skeleton(CubeSpec{origin(1), 27, -1}, 5), std::invalid_argument);
}

TEST_CASE("max disjoint count basics") {
  CHECK(max_disjoint_count({}, 9).count == 0);
  CHECK(max_disjoint_count({{0}}, 9).count == 1);
  auto r = max_disjoint_count({{0}, {3}, {9}}, 9);
  CHECK(r.count == 2);
  CHECK(r.exact);
}

static int brute_force_disjoint(const std::vector<Point>& cs, int64_t l) {
  int n = static_cast<int>(cs.size());
  int best = 0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && norm_max(cs[i], cs[j]) < l) ok = false;
    if (ok) best = std::max(best, __builtin_popcount(mask));
  }
  return best;
}

TEST_CASE("max disjoint count matches subset enumeration") {
  for (uint64_t trial = 0; trial < 30; ++trial) {
    std::vector<Point> cs;
    int n = 3 + static_cast<int>(counter_uniform(3, trial, 0) * 8);
    for (int i = 0; i < n; ++i)
      cs.push_back({static_cast<int64_t>(counter_uniform(4, trial, i) * 10) * 3});
    auto r = max_disjoint_count(cs, 9);
    CHECK(r.exact);
    CHECK(r.count == brute_force_disjoint(cs, 9));
  }
}

TEST_CASE("max disjoint count is monotone and greedy lower-bounds exact") {
  std::vector<Point> cs;
  int prev = 0;
  for (uint64_t i = 0; i < 15; ++i) {
    cs.push_back({static_cast<int64_t>(counter_uniform(5, 1, i) * 30) * 3});
    auto exact = max_disjoint_count(cs, 9);
    CHECK(exact.count >= prev);
    prev = exact.count;
    auto greedy = max_disjoint_count(cs, 9, /*exact_threshold=*/0);
    CHECK(!greedy.exact);
    CHECK(greedy.count <= exact.count);
  }
}

TEST_CASE("annulus of inner cubes is covered by fewer than Y^d cells") {
  // any sub-cube of size < 27 inside the 27-cube: its annulus needs < 9 cells
  for (int64_t size : {5, 7, 9, 15, 21}) {
    for (int64_t c = -9; c <= 9; c += 3) {
      CubeSpec sub{{c}, size, -1};
      if (std::abs(c) + sub.radius() > 13) continue;
      auto centers = covering_centers(boundary_annulus(sub), 3);
      CHECK(centers.size() < 9);
    }
  }
}
