// Fixed-energy to variable-energy reduction and eigenfunction-correlator
// machinery: tail bounds for the supremum of boundary Green maxima over an
// energy interval, interval-coverage structure of the exceedance set, the
// correlator sup over unit-bounded spectral functions, and the dynamical
// bound check 4 eps + h_L.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "afs/disorder.hpp"
#include "afs/lattice.hpp"
#include "afs/operators.hpp"
#include "afs/stats.hpp"

namespace afs {

struct ReductionParams {
  double a_l, b_l, c_l, q_l;           // all positive
  double i_lo, i_hi;                   // energy interval I
  std::function<double(double)> f;     // monotone two-cube spectral-distance bound

  // enforces b <= min(a c^2, c); throws invalid-params otherwise
  ReductionParams(double a, double b, double c, double q, double lo, double hi,
                  std::function<double(double)> fbound);
  double interval_length() const { return i_hi - i_lo; }
};

// |I| q / b + f(2c)
double etv_tail_bound(const ReductionParams& p);

struct CorollaryBound {
  double threshold;  // max(a, sqrt(q))
  double tail;       // |I| q^{1/4} + f(2 q^{1/4})
};

CorollaryBound corollary_bound(double a, double q, double interval_length,
                               const std::function<double(double)>& f);

struct SweepReport {
  bool covered = true;          // every exceedance grid point is within 2c of an eigenvalue
  int exceedance_points = 0;
  int covering_intervals = 0;   // distinct eigenvalues actually covering exceedances
  int grid_points = 0, skipped_near_singular = 0;
  std::vector<double> violating_energies;
};

// Scans F_{z,L}(E) = max boundary |G(z, y; E)| over a grid on I, skipping grid
// points within the near-singular tolerance of the local spectrum; checks that
// {F > 2a} is covered by 2c-intervals around local eigenvalues.
SweepReport energy_sweep_structure(const DisorderRealization& v, const Point& z, int64_t l,
                                   double i_lo, double i_hi, double grid_step, double a,
                                   double c, const OperatorConfig& cfg = {});

// Analytic bound f(eps) on P{ dist(Sigma(H_{B_L(x)}), Sigma(H_{B_L(y)})) <= eps }
// for the flat-density family: C L^{2d} eps with C = 2 / density. Other
// families need an empirical curve instead.
std::function<double(double)> analytic_pair_distance_bound(const DisorderSpec& dis, int d,
                                                           int64_t l);

// Eigenfunction correlator sup_{|phi|<=1} |<1_x, phi(H_Lam) 1_y>| = sum of
// absolute spectral-projector elements; projectors grouped at relative gap
// 1e-10 before summation.
double efc_pair(const DisorderRealization& v, const Point& x, const Point& y,
                const std::vector<Point>& domain, int dim);

struct DlBoundCheck {
  MeanCI efc_mean;
  EstimatorResult h_hat;      // both cubes (E, eps)-S for some grid E in I
  double bound = 0.0;         // 4 eps + upper CI of h_hat
  bool pass = false, inconclusive = false;
};

// Empirical check of mean EFC <= 4 eps + h_L over n realizations; the
// "exists E in I" event is approximated on the given energy grid.
DlBoundCheck dl_bound_check(uint64_t n, double eps, const Point& x, const Point& y,
                            int64_t l, const CubeSpec& ambient, const DisorderSpec& dis,
                            double i_lo, double i_hi, double grid_step, int64_t y_k,
                            int workers = 1, const OperatorConfig& cfg = {});

}  // namespace afs
