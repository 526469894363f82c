// Combinatorial geometry of lattice cubes on Z^d: cells, cores, shells,
// width-2 boundary annuli, admissible centers, skeleton graphs, and disjoint
// cube packing counts.
//
// A cube of odd size L centered at u is {y : |y-u|_max <= L/2}, i.e. L sites
// per axis. When L = 3*l the cube splits into 3^d cells of size l whose
// centers live on the sublattice (l*Z)^d anchored at the origin; those are
// the admissible centers. All site lists are in lexicographic coordinate
// order, which is the canonical basis order for matrix assembly everywhere.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace afs {

using Point = std::vector<int64_t>;  // lexicographic operator< is canonical

int64_t norm_max(const Point& a, const Point& b);
int64_t norm_l1(const Point& a, const Point& b);
Point origin(int d);

struct CubeSpec {
  Point center;
  int64_t size = 1;        // odd site count per axis
  int scale_index = -1;    // optional scale k; -1 when not tied to a scale

  int dim() const { return static_cast<int>(center.size()); }
  int64_t radius() const { return (size - 1) / 2; }  // max-norm radius
  bool contains(const Point& p) const { return norm_max(p, center) <= radius(); }
  int64_t site_count() const;
};

// All sites of the cube in lexicographic order. size must be odd and >= 1.
std::vector<Point> cube_sites(const CubeSpec& c);

struct CoreShell {
  CubeSpec core;            // central cell B_l(center), l = size/3
  std::vector<Point> shell; // cube minus core, lexicographic order
};

// size must be divisible by 3 (hence the cell size l = size/3 is odd).
CoreShell core_shell(const CubeSpec& c);

// Width-2 boundary annulus {y : R-2 < |y-center| <= R}, R = (size-1)/2.
// Requires size >= 5 so that the annulus is a proper subset.
std::vector<Point> boundary_annulus(const CubeSpec& c);

// Relaxed variant used by operator probes on very small cubes: the two
// outermost max-norm layers, degenerating to the whole cube when size <= 3.
std::vector<Point> annulus_two_layers(const CubeSpec& c);

// Admissible center of the size-l cell containing site p (cells tile Z^d,
// centers on (l*Z)^d including the origin).
Point cell_center_of(const Point& p, int64_t cell_size);

// Minimal set of admissible centers whose cells intersect A.
std::vector<Point> covering_centers(const std::vector<Point>& a, int64_t cell_size);

struct SkeletonGraph {
  int64_t cell_size = 1;
  std::vector<Point> vertices;                    // admissible centers, lex order
  std::vector<std::vector<int>> edges;            // adjacency lists (indices)
  std::vector<int> layer_of;                      // graph distance from center vertex
  std::vector<std::vector<int>> layers;           // layer r -> vertex indices
  int max_radius = 0;                             // R

  int vertex_index(const Point& p) const;         // -1 if absent
};

// Skeleton graph of the cube over cells of the given size: vertices are the
// admissible centers inside the cube, edges join centers at max-distance
// exactly cell_size. cube.size must be an odd multiple of 3*cell_size.
SkeletonGraph skeleton(const CubeSpec& cube, int64_t cell_size);

struct DisjointCount {
  int count = 0;
  bool exact = true;  // false => greedy lower bound
};

// Maximum number of pairwise disjoint size-L cubes among the flagged centers
// (two equal odd cubes are disjoint iff their centers are at max-distance
// >= L). Exact branch-and-bound up to `exact_threshold` centers, greedy
// lexicographic lower bound beyond.
DisjointCount max_disjoint_count(const std::vector<Point>& centers, int64_t cube_size,
                                 int exact_threshold = 20);

}  // namespace afs
