// Monte-Carlo estimators for the probabilistic quantities of the scaling
// analysis, and per-realization checks of the deterministic implications
// (resolvent inequality, dominated decay, radial decay chain, probability
// recursion).
//
// Every realization is an independent work item keyed by its index; results
// land in an index-ordered vector and aggregates fold over that order, so a
// run is bit-identical no matter how many workers execute it.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "afs/disorder.hpp"
#include "afs/engine.hpp"
#include "afs/lattice.hpp"
#include "afs/operators.hpp"
#include "afs/stats.hpp"

namespace afs {

struct McOptions {
  int workers = 1;
  OperatorConfig op;
};

// Index-ordered deterministic parallel map.
template <typename R>
std::vector<R> parallel_map(uint64_t n, int workers, const std::function<R(uint64_t)>& f);

// Desk-scale slice of a pair of adjacent engine records (scale k and k+1).
struct ScalePair {
  int d = 1;
  int k = 0;
  int64_t L = 3, Y = 9;          // scale k
  int64_t L_next = 27, Y_next = 9, S_next = 1, N_next = 3;
  double b = 5.0, s = 3.0;       // exponents at scale k
  double a_next = 23.0;          // (3 Y_{k+1} - 4)^d

  int64_t cell() const { return L / 3; }
  double eps_singular() const;   // L_k^{-b_k}
  double eps_cnr() const;        // L_{k+1}^{-s_k}
  double decay_rhs() const;      // L_k^{d/8} L_k^{-b_k N_{k+1}}

  static ScalePair from_records(const BaseParams& base, const ScaleRecord& cur,
                                const ScaleRecord& nxt);
  // Single-scale view for classification-only probes (next-scale fields are
  // copies of the current scale and must not be used for geometry).
  static ScalePair from_single(const BaseParams& base, const ScaleRecord& cur);
};

// ---- estimators ----

// out_flags, when given, receives the per-realization singular flag in index
// order (for JSON-lines emission).
EstimatorResult estimate_singular_prob(const ScalePair& sp, double e, uint64_t n,
                                       const DisorderSpec& dis, const McOptions& opt = {},
                                       std::vector<char>* out_flags = nullptr);

struct WegnerPoint {
  double eps = 0.0;
  EstimatorResult est;
  double bound = 0.0;  // C L^d eps^beta; 0 when no constant test applies
};

struct WegnerCurve {
  std::vector<WegnerPoint> points;  // one per grid eps, same samples (nested events)
  double slope = 0.0;               // log-log regression over points with successes > 0
  int slope_points = 0;
};

// ¬NR frequency at each grid threshold on a common sample set. For the
// uniform family the per-point bound is (2/density) L^d eps; other families
// carry no constant test (slope only).
WegnerCurve estimate_wegner(int d, int64_t l, double e, uint64_t n,
                            const DisorderSpec& dis, const std::vector<double>& eps_grid,
                            const McOptions& opt = {});

struct CnrFailure {
  EstimatorResult est;                   // CNR-failure frequency
  std::vector<uint64_t> per_cube_not_nr; // ¬NR counts per concentric cube
  std::vector<int64_t> cube_sizes;
};

CnrFailure estimate_cnr_failure(const ScalePair& sp, double e, uint64_t n,
                                const DisorderSpec& dis, const McOptions& opt = {});

// ---- per-realization implication checks ----

struct LemmaCheck {
  uint64_t realization_index = 0;
  bool hypotheses_hold = false;
  bool conclusion_holds = false;
  bool cnr_ok = false;
  int disjoint_singular = 0;
  bool disjoint_exact = true;
  double dnorm_value = 0.0, dnorm_bound = 0.0;

  bool violation() const { return hypotheses_hold && !conclusion_holds; }
};

LemmaCheck check_dominated_decay(const ScalePair& sp, double e,
                                 const DisorderRealization& v, const McOptions& opt = {});

struct ChainStep {
  char property = 'A';
  int r = 0, r_to = 0;
  double lhs = 0.0, rhs = 0.0;
  bool holds = true;
};

struct ChainReport {
  uint64_t realization_index = 0;
  bool hypotheses_hold = false;   // CNR + singular budget, as in dominated decay
  std::vector<ChainStep> steps;
  double worst_slack_a = 0.0, worst_slack_b = 0.0, worst_slack_c = 0.0;  // max lhs/rhs
  int violations = 0;             // steps with lhs > rhs (1 + tol)
  bool f_max_identity_ok = true;  // F(r) = max_{r' <= r} f(r')
  std::vector<double> f, F;       // radial profiles
};

ChainReport check_appendix_chain(const ScalePair& sp, double e,
                                 const DisorderRealization& v, double rel_tol = 1e-8,
                                 const McOptions& opt = {});

std::vector<LemmaCheck> dominated_decay_checks(const ScalePair& sp, double e, uint64_t n,
                                               const DisorderSpec& dis,
                                               const McOptions& opt = {});

struct BatchSummary {
  uint64_t n = 0, qualifying = 0, violations = 0;
  double worst_margin = 0.0;  // max dnorm/bound over qualifying samples
};

BatchSummary summarize(const std::vector<LemmaCheck>& checks);

BatchSummary run_dominated_decay_batch(const ScalePair& sp, double e, uint64_t n,
                                       const DisorderSpec& dis, const McOptions& opt = {});

std::vector<ChainReport> appendix_chain_reports(const ScalePair& sp, double e, uint64_t n,
                                                const DisorderSpec& dis, double rel_tol = 1e-8,
                                                const McOptions& opt = {});

struct ChainBatchSummary {
  uint64_t n = 0, qualifying = 0, violations = 0;
  double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0;
};

ChainBatchSummary summarize(const std::vector<ChainReport>& reports);

ChainBatchSummary run_appendix_chain_batch(const ScalePair& sp, double e, uint64_t n,
                                           const DisorderSpec& dis, double rel_tol = 1e-8,
                                           const McOptions& opt = {});

// ---- probability recursion ----

enum class RecursionVerdict { Pass, Inconclusive, Violation };

struct RecursionCheck {
  RecursionVerdict verdict = RecursionVerdict::Inconclusive;
  double lhs_upper = 0.0;   // upper CI of p_{k+1}
  double lhs_lower = 0.0;
  double rhs = 0.0;         // (1/2)(a p_k^U)^{S+1} + (1/2) w^U
  std::string note;
};

// Verifies p_{k+1} <= (1/2)(a_{k+1} p_k)^{S_{k+1}+1} + (1/2) w_{k+1} on CI
// endpoints; overlap is inconclusive, never a failure.
RecursionCheck check_recursion_empirically(const ScalePair& sp,
                                           const EstimatorResult& p_k,
                                           const EstimatorResult& p_k1,
                                           const EstimatorResult& w_k1);

// ---- eigenfunction-correlator scaling probe ----

struct EfcPoint {
  int64_t l = 0;
  MeanCI efc;        // disorder-averaged correlator between opposite faces
  double diagnostic; // ln ln(1/mean) / ln L
};

struct EfcCurve {
  std::vector<EfcPoint> points;
  double spearman_l = 0.0;  // rank correlation of diagnostic vs L
};

EfcCurve efc_scaling_probe(int d, const std::vector<int64_t>& l_list, uint64_t n,
                           const DisorderSpec& dis, const McOptions& opt = {});

}  // namespace afs
