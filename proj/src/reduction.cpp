#include "afs/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "afs/mc.hpp"

namespace afs {

ReductionParams::ReductionParams(double a, double b, double c, double q, double lo,
                                 double hi, std::function<double(double)> fbound)
    : a_l(a), b_l(b), c_l(c), q_l(q), i_lo(lo), i_hi(hi), f(std::move(fbound)) {
  if (!(a > 0 && b > 0 && c > 0 && q >= 0) || hi < lo)
    throw std::invalid_argument("invalid-params: reduction parameters out of range");
  if (!(b <= std::min(a * c * c, c)))
    throw std::invalid_argument("invalid-params: need b <= min(a c^2, c)");
}

double etv_tail_bound(const ReductionParams& p) {
  return p.interval_length() * p.q_l / p.b_l + p.f(2.0 * p.c_l);
}

CorollaryBound corollary_bound(double a, double q, double interval_length,
                               const std::function<double(double)>& f) {
  if (!(a > 0 && a <= 1 && q > 0 && q <= 1))
    throw std::invalid_argument("corollary_bound: a, q must lie in (0, 1]");
  CorollaryBound cb;
  cb.threshold = std::max(a, std::sqrt(q));
  double q4 = std::pow(q, 0.25);
  cb.tail = interval_length * q4 + f(2.0 * q4);
  return cb;
}

SweepReport energy_sweep_structure(const DisorderRealization& v, const Point& z, int64_t l,
                                   double i_lo, double i_hi, double grid_step, double a,
                                   double c, const OperatorConfig& cfg) {
  if (grid_step <= 0) throw std::invalid_argument("energy_sweep_structure: grid_step must be > 0");
  CubeSpec cube{z, l, -1};
  auto h = assemble(cube, v);
  const auto& ev = h.spectrum(cfg.dense_cap);

  std::vector<Point> boundary;
  for (auto& p : cube_sites(cube))
    if (norm_max(p, z) == cube.radius()) boundary.push_back(p);

  SweepReport rep;
  std::set<int> covering;
  for (double e = i_lo; e <= i_hi + 1e-15; e += grid_step) {
    double dist = h.spectral_distance(e, cfg.dense_cap);
    if (dist < kNearSingularTol) {
      ++rep.skipped_near_singular;
      continue;
    }
    ++rep.grid_points;
    Eigen::MatrixXd g = h.green_block(e, boundary, {z});
    double fmax = g.cwiseAbs().maxCoeff();
    if (fmax > 2.0 * a) {
      ++rep.exceedance_points;
      int nearest = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < ev.size(); ++j) {
        double dj = std::abs(ev[j] - e);
        if (dj < best) { best = dj; nearest = j; }
      }
      if (best <= 2.0 * c) {
        covering.insert(nearest);
      } else {
        rep.covered = false;
        rep.violating_energies.push_back(e);
      }
    }
  }
  rep.covering_intervals = static_cast<int>(covering.size());
  return rep;
}

std::function<double(double)> analytic_pair_distance_bound(const DisorderSpec& dis, int d,
                                                           int64_t l) {
  if (dis.family != DisorderFamily::Uniform)
    throw std::invalid_argument("analytic pair-distance bound needs the flat-density family");
  double c = 2.0 / (dis.lambda * (dis.b - dis.a));
  double vol2 = std::pow(static_cast<double>(l), 2 * d);
  return [c, vol2](double eps) { return std::min(1.0, c * vol2 * eps); };
}

double efc_pair(const DisorderRealization& v, const Point& x, const Point& y,
                const std::vector<Point>& domain, int dim) {
  auto h = assemble(domain, v, dim);
  const int n = static_cast<int>(h.sites().size());
  if (h.index_of(x) < 0 || h.index_of(y) < 0)
    throw std::invalid_argument("efc_pair: x, y must lie in the domain");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix());
  const auto& ev = es.eigenvalues();
  const auto& q = es.eigenvectors();
  const int ix = h.index_of(x), iy = h.index_of(y);

  // group near-degenerate eigenvalues (relative gap 1e-10) into one projector
  double scale = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
  double gap = 1e-10 * std::max(1.0, scale);
  double total = 0.0;
  int j = 0;
  while (j < n) {
    int j2 = j;
    double proj = q(ix, j) * q(iy, j);
    while (j2 + 1 < n && ev[j2 + 1] - ev[j2] <= gap) {
      ++j2;
      proj += q(ix, j2) * q(iy, j2);
    }
    total += std::abs(proj);
    j = j2 + 1;
  }
  return total;
}

DlBoundCheck dl_bound_check(uint64_t n, double eps, const Point& x, const Point& y,
                            int64_t l, const CubeSpec& ambient, const DisorderSpec& dis,
                            double i_lo, double i_hi, double grid_step, int64_t y_k,
                            int workers, const OperatorConfig& cfg) {
  CubeSpec bx{x, l, -1}, by{y, l, -1};
  if (norm_max(x, y) < l)
    throw std::invalid_argument("dl_bound_check: the two cubes must be disjoint");
  // B_{l+1}-neighborhoods of both cubes must fit in the ambient domain
  for (const Point& z : {x, y})
    if (norm_max(z, ambient.center) + (l + 1) / 2 + 1 > ambient.radius())
      throw std::invalid_argument("dl_bound_check: ambient domain too small");

  auto domain = cube_sites(ambient);
  std::vector<double> efcs(n);
  std::vector<char> sing(n);
  auto work = [&](uint64_t i) -> char {
    auto v = sample(dis, i);
    efcs[i] = efc_pair(v, x, y, domain, ambient.dim());
    auto hx = assemble(bx, v);
    auto hy = assemble(by, v);
    for (double e = i_lo; e <= i_hi + 1e-15; e += grid_step) {
      bool sx = !(hx.spectral_distance(e, cfg.dense_cap) >= kNearSingularTol) ||
                dnorm(bx, e, v, y_k, cfg) > eps;
      if (!sx) continue;
      bool sy = !(hy.spectral_distance(e, cfg.dense_cap) >= kNearSingularTol) ||
                dnorm(by, e, v, y_k, cfg) > eps;
      if (sy) return 1;
    }
    return 0;
  };
  auto flags = parallel_map<char>(n, workers, work);
  for (uint64_t i = 0; i < n; ++i) sing[i] = flags[i];

  DlBoundCheck out;
  out.efc_mean = mean_ci(efcs);
  uint64_t hits = 0;
  for (char s : sing) hits += s;
  out.h_hat = EstimatorResult::from_counts("h_hat_both_singular", hits, n, dis.master_seed);
  out.bound = 4.0 * eps + out.h_hat.ci.upper;
  if (out.efc_mean.upper <= out.bound) {
    out.pass = true;
  } else if (out.efc_mean.lower <= out.bound) {
    out.inconclusive = true;
  }
  return out;
}

}  // namespace afs
