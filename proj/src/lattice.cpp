#include "afs/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace afs {

int64_t norm_max(const Point& a, const Point& b) {
  int64_t m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

int64_t norm_l1(const Point& a, const Point& b) {
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

Point origin(int d) { return Point(static_cast<size_t>(d), 0); }

int64_t CubeSpec::site_count() const {
  int64_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= size;
  return n;
}

static void check_cube(const CubeSpec& c) {
  if (c.size < 1 || c.size % 2 == 0)
    throw std::invalid_argument("invalid cube: size must be odd and positive");
  if (c.center.empty()) throw std::invalid_argument("invalid cube: empty center");
}

std::vector<Point> cube_sites(const CubeSpec& c) {
  check_cube(c);
  const int d = c.dim();
  const int64_t r = c.radius();
  std::vector<Point> out;
  out.reserve(static_cast<size_t>(c.site_count()));
  Point p(c.center);
  for (int i = 0; i < d; ++i) p[i] = c.center[i] - r;
  while (true) {
    out.push_back(p);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (p[i] < c.center[i] + r) {
        ++p[i];
        for (int j = i + 1; j < d; ++j) p[j] = c.center[j] - r;
        break;
      }
    }
    if (i < 0) break;
  }
  return out;
}

CoreShell core_shell(const CubeSpec& c) {
  check_cube(c);
  if (c.size % 3 != 0)
    throw std::invalid_argument("invalid partition: cube size not divisible by 3");
  CoreShell cs;
  cs.core = CubeSpec{c.center, c.size / 3, c.scale_index};
  const int64_t lr = cs.core.radius();
  for (auto& p : cube_sites(c))
    if (norm_max(p, c.center) > lr) cs.shell.push_back(p);
  return cs;
}

std::vector<Point> annulus_two_layers(const CubeSpec& c) {
  check_cube(c);
  const int64_t r = c.radius();
  std::vector<Point> out;
  for (auto& p : cube_sites(c))
    if (norm_max(p, c.center) > r - 2) out.push_back(p);
  return out;
}

std::vector<Point> boundary_annulus(const CubeSpec& c) {
  check_cube(c);
  if (c.size < 5)
    throw std::invalid_argument("invalid annulus: cube size must be >= 5");
  return annulus_two_layers(c);
}

Point cell_center_of(const Point& p, int64_t l) {
  if (l < 1 || l % 2 == 0)
    throw std::invalid_argument("cell size must be odd and positive");
  Point c(p.size());
  const int64_t h = (l - 1) / 2;
  for (size_t i = 0; i < p.size(); ++i) {
    int64_t shifted = p[i] + h;
    int64_t q = shifted >= 0 ? shifted / l : -((-shifted + l - 1) / l);
    c[i] = q * l;
  }
  return c;
}

std::vector<Point> covering_centers(const std::vector<Point>& a, int64_t l) {
  std::set<Point> centers;
  for (auto& p : a) centers.insert(cell_center_of(p, l));
  return {centers.begin(), centers.end()};
}

int SkeletonGraph::vertex_index(const Point& p) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
  if (it == vertices.end() || *it != p) return -1;
  return static_cast<int>(it - vertices.begin());
}

SkeletonGraph skeleton(const CubeSpec& cube, int64_t l) {
  check_cube(cube);
  // a single cell is a degenerate skeleton with one vertex
  if (l < 1 || l % 2 == 0 || (cube.size != l && cube.size % (3 * l) != 0))
    throw std::invalid_argument("invalid skeleton: cube size must be an odd multiple of 3*cell_size");
  if (cell_center_of(cube.center, l) != cube.center)
    throw std::invalid_argument("invalid skeleton: cube center is not an admissible cell center");

  SkeletonGraph g;
  g.cell_size = l;
  const int d = cube.dim();
  const int64_t r = cube.radius();
  // Admissible centers inside the cube form a grid of step l around the center.
  const int64_t m = (r - (l - 1) / 2) / l;  // grid extent per axis
  CubeSpec grid{origin(d), 2 * m + 1, -1};
  for (auto& q : cube_sites(grid)) {
    Point v(cube.center);
    for (int i = 0; i < d; ++i) v[i] += q[i] * l;
    g.vertices.push_back(v);
  }
  std::sort(g.vertices.begin(), g.vertices.end());

  const int n = static_cast<int>(g.vertices.size());
  g.edges.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (norm_max(g.vertices[i], g.vertices[j]) == l) {
        g.edges[i].push_back(j);
        g.edges[j].push_back(i);
      }

  // Graph distance from the center vertex equals max-norm distance / l, but
  // run the BFS anyway: it is the definition.
  const int c0 = g.vertex_index(cube.center);
  g.layer_of.assign(n, -1);
  g.layer_of[c0] = 0;
  std::vector<int> frontier{c0};
  int radius = 0;
  g.layers.push_back(frontier);
  while (true) {
    std::vector<int> next;
    for (int v : frontier)
      for (int w : g.edges[v])
        if (g.layer_of[w] < 0) {
          g.layer_of[w] = radius + 1;
          next.push_back(w);
        }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    ++radius;
    g.layers.push_back(next);
    frontier = std::move(next);
  }
  g.max_radius = radius;
  return g;
}

namespace {

// Exact maximum independent set on the conflict graph, branching on the
// lowest available vertex. Fine up to ~20 flagged centers.
int mis(const std::vector<uint32_t>& conflict, uint32_t avail) {
  if (avail == 0) return 0;
  int idx = __builtin_ctz(avail);
  uint32_t without = avail & ~(1u << idx);
  int skip = mis(conflict, without);
  int take = 1 + mis(conflict, without & ~conflict[idx]);
  return std::max(skip, take);
}

}  // namespace

DisjointCount max_disjoint_count(const std::vector<Point>& centers, int64_t cube_size,
                                 int exact_threshold) {
  std::vector<Point> cs(centers);
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  const int n = static_cast<int>(cs.size());
  if (n == 0) return {0, true};

  if (n <= exact_threshold && n <= 31) {
    std::vector<uint32_t> conflict(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && norm_max(cs[i], cs[j]) < cube_size) conflict[i] |= 1u << j;
    uint32_t all = n == 32 ? ~0u : ((1u << n) - 1);
    return {mis(conflict, all), true};
  }

  // Greedy lexicographic maximal collection: a lower bound.
  std::vector<Point> chosen;
  for (auto& c : cs) {
    bool ok = true;
    for (auto& k : chosen)
      if (norm_max(c, k) < cube_size) { ok = false; break; }
    if (ok) chosen.push_back(c);
  }
  return {static_cast<int>(chosen.size()), false};
}

}  // namespace afs
