// Seeded IID random potentials with configurable marginal regularity.
//
// Families:
//   uniform(a,b)            V = lambda * (a + (b-a) U)
//   holder(beta)            V = lambda * U^(1/beta), so F_V(t) = (t/lambda)^beta
//   almost_zero_order(C,C') V = lambda * Q(U) where Q inverts the distribution
//                           function F(t) = t^(C / ln ln(1/t)) for t <= e^{-e^2},
//                           glued linearly to 1 on [e^{-e^2}, 1]. Its continuity
//                           modulus obeys s_V(eps) <= C' eps^(C/ln|ln eps|) in
//                           the small-eps regime.
//
// Values are deterministic functions of (master_seed, realization_index, site).

#pragma once

#include <cstdint>
#include <string>

#include "afs/lattice.hpp"

namespace afs {

enum class DisorderFamily { Uniform, Holder, AlmostZeroOrder };

struct DisorderSpec {
  DisorderFamily family = DisorderFamily::Uniform;
  double a = 0.0, b = 1.0;   // uniform support (before lambda)
  double beta = 1.0;         // holder order, in (0,1]
  double C = 1.0, Cp = 1.0;  // almost_zero_order modulus constants
  double lambda = 1.0;       // disorder strength, >= 0
  uint64_t master_seed = 0;

  void validate() const;  // throws std::invalid_argument on a bad spec
  std::string family_name() const;
};

// A realization is (spec, index); values are computed on demand.
struct DisorderRealization {
  DisorderSpec spec;
  uint64_t realization_index = 0;

  double value(const Point& site) const;
};

DisorderRealization sample(const DisorderSpec& spec, uint64_t realization_index);

// Marginal distribution function F_V(t) of the scaled variable (lambda applied).
double marginal_cdf(const DisorderSpec& spec, double t);

// Analytic upper bound on sup_t [F_V(t+eps) - F_V(t)] for eps in (0, 1/2).
double continuity_modulus(const DisorderSpec& spec, double eps);

// Base-variable quantile for the almost_zero_order family (lambda = 1),
// exposed for tests. Bisection to 1e-14 absolute on the curved branch.
double azo_quantile(double u, double C);
double azo_cdf(double t, double C);

}  // namespace afs
