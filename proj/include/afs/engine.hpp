// Deterministic scale recursion and inequality certificate.
//
// Base parameters feed a per-scale recursion
//   L_k = Y_k L_{k-1},  Y_{k+1} = 9 (k+1 <= K) or floor(L_k^tau) (k+1 > K),
//   S_{k+1} = 1 or floor(Y_{k+1}/9),  N_k = Y_k - 5 S_k - 1,
//   b_{k+1} = (4/5) N_{k+1} b_k,  s_k = (5/6) b_k  (k >= 1),
//   sigma_k = B_k ... B_1 sigma_0,  rho_k = D_k ... D_2 rho_1,
// with the feedback factors B, D switching from their initial values to
// (2/3)(S_j + 1) after step K+1. Integer quantities are exact (GMP), rational
// ones exact rationals, and every transcendental comparison runs in
// outward-rounded interval arithmetic, so a "pass" verdict is sound.

#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "afs/ival.hpp"

namespace afs {

struct BaseParams {
  int d = 1;
  mpq_class beta;        // Holder order of the marginal distribution
  mpq_class b0;          // initial decay exponent, > d/beta
  mpq_class p0;          // initial singularity probability, < 23^{-2d}
  std::string p0_provenance = "rational literal";
  mpz_class L0;

  // derived
  mpq_class eta, s0, tau, rho1;
  mpz_class a1;          // (3 Y1 - 4)^d = 23^d
  long Y1 = 9, S1 = 1;
  Ival theta0, sigma0, tau0;
  long K = 0;            // first k >= 1 with (1+theta0)^k >= 2d/sigma0
};

// Throws std::invalid_argument ("invalid-b0", "threshold-violated", ...) on
// out-of-range inputs or theta0 outside (0, 1/3).
BaseParams derive_base(int d, const mpq_class& beta, const mpq_class& b0,
                       const mpq_class& p0, const mpz_class& L0);

struct L0Threshold {
  struct Candidate {
    std::string name;
    Ival value;
    bool exact = false;
    mpz_class exact_value;  // valid when exact and integral
  };
  std::vector<Candidate> candidates;
  Ival max_value;
  std::string max_name;
};

L0Threshold l0_threshold(int d, const mpq_class& beta, const mpq_class& b0,
                         const mpq_class& p0);

// L0 >= max candidate, decided exactly for integral candidates and by sound
// interval comparison otherwise.
bool l0_satisfies(const mpz_class& l0, const L0Threshold& th);

struct ScaleRecord {
  int k = 0;
  bool exact_mode = true;

  // exact quantities (valid in exact mode)
  mpz_class L, Y, S, N, a;
  mpq_class b, s, A, rho, D;  // rho, D valid for k >= 1 / k >= 2

  // interval quantities (always maintained)
  Ival ln_L, ln_Y, S_iv;
  Ival b_iv, s_iv, rho_iv, sigma, B_iv, D_iv;
  Ival ln_q;  // ln(2 L^{-rho})

  // exponential-scaling exponents
  Ival delta, kappa, delta_lower;
  bool delta_defined = true, kappa_defined = true;

  std::string regime;  // recursion case label: A1/A2/B1/B2
};

ScaleRecord initial_record(const BaseParams& base);

// Builds record k+1 from record k. exact_k_cap bounds the exact-arithmetic
// regime; beyond it sizes are carried as floorless interval logs and the
// record is flagged exact_mode = false.
ScaleRecord advance_scale(const ScaleRecord& rec, const BaseParams& base,
                          int exact_k_cap = 120);

// floor(x^(1/n)) for big integers; exact by construction.
mpz_class integer_root(const mpz_class& x, unsigned long n);

// Sound enclosure of ln((e^t1 + e^t2) / 2) that never forms the exponentials,
// so it stays finite for arbitrarily negative t1, t2.
Ival log_half_sum_exp(const Ival& t1, const Ival& t2);

enum class CheckStatus { Pass, Fail, Skipped, Undecided };

struct CheckRow {
  std::string name;
  int k = 0;
  CheckStatus status = CheckStatus::Pass;
  std::string lhs, rhs, note;
};

struct Certificate {
  BaseParams base;
  std::vector<ScaleRecord> records;
  std::vector<CheckRow> checks;
  std::string mode = "exact";
  int digits = 50;
  bool overall = false;
  std::string failure_reason;  // empty when overall pass
};

std::vector<CheckRow> verify_growth(const std::vector<ScaleRecord>& recs, const BaseParams& base);
std::vector<CheckRow> verify_wegner_chain(const std::vector<ScaleRecord>& recs, const BaseParams& base);
std::vector<CheckRow> verify_probability_recursion(std::vector<ScaleRecord>& recs, const BaseParams& base);
std::vector<CheckRow> verify_esl_convergence(const std::vector<ScaleRecord>& recs, const BaseParams& base);

struct EslExponents {
  Ival delta, kappa, delta_lower;
  bool delta_defined = true, kappa_defined = true;
};
EslExponents esl_exponents(const ScaleRecord& rec);

// Runs the recursion to k_max and evaluates every per-scale check.
Certificate run_certificate(const BaseParams& base, int k_max, int exact_k_cap = 120);

}  // namespace afs
