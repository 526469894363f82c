#include "afs/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace afs {

LocalHamiltonian::LocalHamiltonian(std::vector<Point> sites, const DisorderRealization& v,
                                   int dim)
    : dim_(dim), sites_(std::move(sites)) {
  if (sites_.empty()) throw std::invalid_argument("assemble: empty site set");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  const int n = static_cast<int>(sites_.size());
  std::map<Point, int> idx;
  for (int i = 0; i < n; ++i) idx[sites_[i]] = i;

  h_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h_(i, i) = 2.0 * dim_ + v.value(sites_[i]);
    Point nb = sites_[i];
    for (int ax = 0; ax < dim_; ++ax) {
      for (int s : {-1, +1}) {
        nb[ax] += s;
        auto it = idx.find(nb);
        if (it != idx.end()) h_(i, it->second) = -1.0;
        nb[ax] -= s;
      }
    }
  }
}

int LocalHamiltonian::index_of(const Point& p) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), p);
  if (it == sites_.end() || *it != p) return -1;
  return static_cast<int>(it - sites_.begin());
}

const Eigen::VectorXd& LocalHamiltonian::spectrum(size_t dense_cap) const {
  if (!eigs_) {
    if (sites_.size() > dense_cap) throw TooLargeError(sites_.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_, Eigen::EigenvaluesOnly);
    eigs_ = es.eigenvalues();
  }
  return *eigs_;
}

double LocalHamiltonian::spectral_distance(double e, size_t dense_cap) const {
  const auto& ev = spectrum(dense_cap);
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) d = std::min(d, std::abs(ev[i] - e));
  return d;
}

Eigen::MatrixXd LocalHamiltonian::green_block(double e, const std::vector<Point>& rows,
                                              const std::vector<Point>& cols) const {
  const int n = static_cast<int>(sites_.size());
  // The resolvent is only defined for E off the spectrum beyond the
  // tolerance; the eigensolve is cached, so this costs once per Hamiltonian.
  if (sites_.size() <= 8192) {
    double dist = spectral_distance(e);
    if (dist < kNearSingularTol) throw NearSingularError(dist);
  }
  if (!lu_ || lu_energy_ != e) {
    Eigen::MatrixXd shifted = h_ - e * Eigen::MatrixXd::Identity(n, n);
    lu_.emplace(shifted);
    lu_energy_ = e;
  }
  Eigen::MatrixXd block(rows.size(), cols.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (size_t j = 0; j < cols.size(); ++j) {
    int cj = index_of(cols[j]);
    if (cj < 0) throw std::invalid_argument("green_block: column site outside domain");
    rhs[cj] = 1.0;
    Eigen::VectorXd g = lu_->solve(rhs);
    double resid = ((h_ * g - e * g) - rhs).norm();
    if (!(resid <= 1e-8 * std::max(1.0, g.norm()))) {
      rhs[cj] = 0.0;
      throw NearSingularError(spectral_distance(e));
    }
    rhs[cj] = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      int ri = index_of(rows[i]);
      if (ri < 0) throw std::invalid_argument("green_block: row site outside domain");
      block(i, j) = g[ri];
    }
  }
  return block;
}

LocalHamiltonian assemble(const std::vector<Point>& sites, const DisorderRealization& v,
                          int dim) {
  return LocalHamiltonian(sites, v, dim);
}

LocalHamiltonian assemble(const CubeSpec& cube, const DisorderRealization& v) {
  return LocalHamiltonian(cube_sites(cube), v, cube.dim());
}

double commutator_norm_exact(const CubeSpec& cube) {
  if (cube.size < 3) throw std::invalid_argument("commutator_norm: cube size must be >= 3");
  // W_{xy} = Delta_{xy} (phi(x) - phi(y)) is supported on edges crossing the
  // boundary of the radius-(R-1) ball; entries are -(phi(x)-phi(y)).
  auto sites = cube_sites(cube);
  const int n = static_cast<int>(sites.size());
  std::map<Point, int> idx;
  for (int i = 0; i < n; ++i) idx[sites[i]] = i;
  const int64_t rphi = cube.radius() - 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    bool phi_i = norm_max(sites[i], cube.center) <= rphi;
    Point nb = sites[i];
    for (int ax = 0; ax < cube.dim(); ++ax) {
      for (int s : {-1, +1}) {
        nb[ax] += s;
        auto it = idx.find(nb);
        if (it != idx.end()) {
          bool phi_j = norm_max(nb, cube.center) <= rphi;
          if (phi_i != phi_j) w(i, it->second) = -((phi_i ? 1.0 : 0.0) - (phi_j ? 1.0 : 0.0));
        }
        nb[ax] -= s;
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double w_norm(const CubeSpec& cube, const OperatorConfig& cfg) {
  return cfg.w_norm_exact ? commutator_norm_exact(cube) : 8.0 * cube.dim();
}

double c_wk(const CubeSpec& cube, int64_t y_k, const OperatorConfig& cfg) {
  double c = w_norm(cube, cfg);
  for (int i = 0; i < cube.dim(); ++i) c *= static_cast<double>(y_k);
  return c;
}

static double block_spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double dnorm(const CubeSpec& cube, double e, const DisorderRealization& v,
             int64_t y_k, const OperatorConfig& cfg) {
  if (cube.size % 3 != 0)
    throw std::invalid_argument("dnorm: cube size must be divisible by 3");
  auto h = assemble(cube, v);
  double dist = h.spectral_distance(e, cfg.dense_cap);
  if (dist < kNearSingularTol) return std::numeric_limits<double>::infinity();
  auto gamma = annulus_two_layers(cube);
  auto core = cube_sites(CubeSpec{cube.center, cube.size / 3, cube.scale_index});
  Eigen::MatrixXd block = h.green_block(e, gamma, core);
  double value = c_wk(cube, y_k, cfg) * block_spectral_norm(block);
  // every probe must respect the a priori resolvent bound; a violation means
  // the solver or the spectrum went bad
  if (value > c_wk(cube, y_k, cfg) / dist * (1.0 + 1e-6))
    throw std::runtime_error("dnorm exceeds the spectral-distance bound");
  return value;
}

ProbeResult probe_cube(const CubeSpec& cube, double e, const DisorderRealization& v,
                       double eps_ns, double eps_nr, int64_t y_k,
                       const OperatorConfig& cfg) {
  if (eps_ns <= 0 || eps_nr <= 0)
    throw std::invalid_argument("probe_cube: thresholds must be positive");
  ProbeResult p;
  p.cube = cube;
  p.e = e;
  p.spectral_distance = assemble(cube, v).spectral_distance(e, cfg.dense_cap);
  p.dnorm_value = dnorm(cube, e, v, y_k, cfg);
  p.is_nr = p.spectral_distance >= eps_nr;
  p.is_ns = p.spectral_distance >= kNearSingularTol && p.dnorm_value <= eps_ns;
  return p;
}

bool classify_NS(const CubeSpec& cube, double e, const DisorderRealization& v,
                 double eps, int64_t y_k, const OperatorConfig& cfg) {
  if (eps <= 0) throw std::invalid_argument("classify_NS: threshold must be positive");
  return dnorm(cube, e, v, y_k, cfg) <= eps;
}

bool classify_NR(const CubeSpec& cube, double e, const DisorderRealization& v,
                 double eps, const OperatorConfig& cfg) {
  if (eps <= 0) throw std::invalid_argument("classify_NR: threshold must be positive");
  return assemble(cube, v).spectral_distance(e, cfg.dense_cap) >= eps;
}

CnrResult classify_CNR(const Point& u, int64_t l_k, int64_t y_k1, double e,
                       const DisorderRealization& v, double eps,
                       const OperatorConfig& cfg) {
  if (y_k1 < 3 || y_k1 % 2 == 0)
    throw std::invalid_argument("classify_CNR: growth factor must be odd and >= 3");
  const int64_t kk = (y_k1 - 1) / 2;
  CnrResult res;
  for (int64_t r = kk; r <= 3 * kk - 1; ++r) {
    CubeSpec c{u, (2 * r + 1) * l_k, -1};
    bool nr = classify_NR(c, e, v, eps, cfg);
    res.cube_sizes.push_back(c.size);
    res.nr.push_back(nr);
    if (!nr) res.cnr = false;
  }
  return res;
}

GriResidual gri_residual(const CubeSpec& b, const CubeSpec& bp, double e,
                         const DisorderRealization& v, const std::vector<Point>& a,
                         const OperatorConfig& cfg) {
  if (b.size % 3 != 0) throw std::invalid_argument("gri_residual: inner cube size must be divisible by 3");
  // inner cube strictly inside the ambient, clear of its annulus
  if (norm_max(b.center, bp.center) + b.radius() > bp.radius() - 2)
    throw std::invalid_argument("gri_residual: inner cube must avoid the ambient annulus");

  std::vector<Point> target = a.empty() ? annulus_two_layers(bp) : a;
  for (auto& p : target)
    if (norm_max(p, b.center) <= b.radius())
      throw std::invalid_argument("gri_residual: target set must be exterior to the inner cube");

  auto hb = assemble(b, v);
  auto hbp = assemble(bp, v);
  GriResidual r{};
  r.dist_inner = hb.spectral_distance(e, cfg.dense_cap);
  r.dist_ambient = hbp.spectral_distance(e, cfg.dense_cap);
  if (r.dist_inner < kNearSingularTol || r.dist_ambient < kNearSingularTol)
    throw NearSingularError(std::min(r.dist_inner, r.dist_ambient));

  auto gamma_b = annulus_two_layers(b);
  auto core = cube_sites(CubeSpec{b.center, b.size / 3, -1});

  r.w_norm = commutator_norm_exact(b);
  r.lhs = block_spectral_norm(hbp.green_block(e, target, core));
  double n1 = block_spectral_norm(hbp.green_block(e, target, gamma_b));
  double n2 = block_spectral_norm(hb.green_block(e, gamma_b, core));
  r.rhs = r.w_norm * n1 * n2;
  return r;
}

double boundary_max_green(const Point& x, int64_t l, double e,
                          const DisorderRealization& v, const OperatorConfig& cfg) {
  CubeSpec cube{x, l, -1};
  auto h = assemble(cube, v);
  if (h.spectral_distance(e, cfg.dense_cap) < kNearSingularTol)
    return std::numeric_limits<double>::infinity();
  std::vector<Point> boundary;
  for (auto& p : cube_sites(cube))
    if (norm_max(p, x) == cube.radius()) boundary.push_back(p);
  Eigen::MatrixXd g = h.green_block(e, boundary, {x});
  return g.cwiseAbs().maxCoeff();
}

}  // namespace afs
