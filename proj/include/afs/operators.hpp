// Local Hamiltonians of the lattice Anderson model, their spectra and Green
// function blocks, the decorated norm used for the non-singularity
// classification, the boundary commutator W, and the geometric resolvent
// residual pair.
//
// H psi(x) = sum_{|y-x|_1 = 1} (psi(x) - psi(y)) + V(x) psi(x), restricted to
// a finite site set with Dirichlet truncation: H_Lam = 1_Lam H 1_Lam.

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "afs/disorder.hpp"
#include "afs/lattice.hpp"

namespace afs {

struct NearSingularError : std::runtime_error {
  double spectral_distance;
  explicit NearSingularError(double dist)
      : std::runtime_error("energy within near-singular tolerance of the local spectrum"),
        spectral_distance(dist) {}
};

struct TooLargeError : std::runtime_error {
  explicit TooLargeError(size_t n)
      : std::runtime_error("domain exceeds the dense solver cap (" + std::to_string(n) + " sites)") {}
};

// Absolute spectral-distance tolerance below which E is treated as being in
// the spectrum.
inline constexpr double kNearSingularTol = 1e-12;

struct OperatorConfig {
  size_t dense_cap = 8192;    // max sites for dense eigensolves
  bool w_norm_exact = false;  // false: ||W|| = 8d bound; true: exact commutator norm
};

class LocalHamiltonian {
 public:
  LocalHamiltonian(std::vector<Point> sites, const DisorderRealization& v, int dim);

  int dim() const { return dim_; }
  const std::vector<Point>& sites() const { return sites_; }
  const Eigen::MatrixXd& matrix() const { return h_; }
  int index_of(const Point& p) const;  // -1 if absent

  // Eigenvalues ascending with multiplicity; cached after first call.
  const Eigen::VectorXd& spectrum(size_t dense_cap = 8192) const;
  double spectral_distance(double e, size_t dense_cap = 8192) const;

  // Block of (H - E)^{-1} with the given row/col sites (must belong to the
  // domain). Factorization-based; verifies per-column residuals to 1e-8
  // relative. Throws NearSingularError when dist(E, spectrum) < tolerance.
  Eigen::MatrixXd green_block(double e, const std::vector<Point>& rows,
                              const std::vector<Point>& cols) const;

 private:
  int dim_;
  std::vector<Point> sites_;   // lexicographic
  Eigen::MatrixXd h_;
  mutable std::optional<Eigen::VectorXd> eigs_;
  mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  mutable double lu_energy_ = std::numeric_limits<double>::quiet_NaN();
};

LocalHamiltonian assemble(const std::vector<Point>& sites, const DisorderRealization& v, int dim);
LocalHamiltonian assemble(const CubeSpec& cube, const DisorderRealization& v);

// Spectral norm of the commutator W = [Phi, Delta] for the cube, where Phi is
// the indicator of the radius-(R-1) sub-ball. Independent of the ambient set
// as long as it contains the cube. Always <= 8d.
double commutator_norm_exact(const CubeSpec& cube);

// ||W|| according to config: the 8d bound (default) or the exact norm.
double w_norm(const CubeSpec& cube, const OperatorConfig& cfg);

// Decorated norm  C_{W,k} * || 1_Gamma (H_B - E)^{-1} chi_core ||  with
// C_{W,k} = Y_k^d ||W||; Gamma is the width-2 boundary annulus and chi the
// central cell indicator. Returns +inf when E is within the near-singular
// tolerance of the local spectrum. y_k is the scale's growth factor.
double dnorm(const CubeSpec& cube, double e, const DisorderRealization& v,
             int64_t y_k, const OperatorConfig& cfg = {});

double c_wk(const CubeSpec& cube, int64_t y_k, const OperatorConfig& cfg);

bool classify_NS(const CubeSpec& cube, double e, const DisorderRealization& v,
                 double eps, int64_t y_k, const OperatorConfig& cfg = {});
bool classify_NR(const CubeSpec& cube, double e, const DisorderRealization& v,
                 double eps, const OperatorConfig& cfg = {});

struct CnrResult {
  bool cnr = true;
  std::vector<int64_t> cube_sizes;  // concentric cube sizes checked
  std::vector<bool> nr;             // per-cube NR flag
};

// One Green-function probe of a cube: decorated norm, spectral distance, and
// the singular/resonant classifications at the given thresholds.
struct ProbeResult {
  CubeSpec cube;
  double e = 0.0;
  double dnorm_value = 0.0;        // +inf when E is near-singular
  double spectral_distance = 0.0;
  bool is_ns = false;              // E off the spectrum and dnorm <= eps_ns
  bool is_nr = false;              // spectral distance >= eps_nr
};

ProbeResult probe_cube(const CubeSpec& cube, double e, const DisorderRealization& v,
                       double eps_ns, double eps_nr, int64_t y_k,
                       const OperatorConfig& cfg = {});

// Completely-non-resonant test at scale k+1: every concentric cube of cells
// within skeleton distance r of u, r = K_{k+1} .. 3K_{k+1}-1 (exactly
// Y_{k+1}-1 cubes, sizes (2r+1) l_k), must be (E,eps)-NR.
CnrResult classify_CNR(const Point& u, int64_t l_k, int64_t y_k1, double e,
                       const DisorderRealization& v, double eps,
                       const OperatorConfig& cfg = {});

struct GriResidual {
  double lhs;       // || 1_A G_{B'} chi_core(B) ||
  double rhs;       // ||W|| * || 1_A G_{B'} Gamma_B || * || Gamma_B G_B chi ||
  double w_norm;    // exact commutator norm used
  double dist_inner, dist_ambient;
};

// Geometric resolvent inequality instance for an inner cube B inside an
// ambient cube Bp at energy E, with exterior target set A (defaults to the
// annulus of Bp). Preconditions: B subset of Bp with B disjoint from the
// annulus of Bp; E off both spectra.
GriResidual gri_residual(const CubeSpec& b, const CubeSpec& bp, double e,
                         const DisorderRealization& v,
                         const std::vector<Point>& a = {},
                         const OperatorConfig& cfg = {});

// max_{y in interior boundary of B_L(x)} |G_{B_L(x)}(x, y; E)|; +inf sentinel
// when E is near-singular.
double boundary_max_green(const Point& x, int64_t l, double e,
                          const DisorderRealization& v, const OperatorConfig& cfg = {});

}  // namespace afs
