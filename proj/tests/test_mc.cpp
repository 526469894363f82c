#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "afs/mc.hpp"
#include "afs/reduction.hpp"

using namespace afs;

namespace {

BaseParams desk_base(long l0) {
  return derive_base(1, mpq_class(1), mpq_class(5), mpq_class(1, 279841), mpz_class(l0));
}

ScalePair desk_pair(long l0) {
  auto base = desk_base(l0);
  std::vector<ScaleRecord> recs{initial_record(base)};
  recs.push_back(advance_scale(recs.back(), base));
  return ScalePair::from_records(base, recs[0], recs[1]);
}

DisorderSpec strong(uint64_t seed) {
  DisorderSpec s;
  s.lambda = 10.0;
  s.master_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("scale pair extracted from engine records") {
  auto sp = desk_pair(3);
  CHECK(sp.L == 3);
  CHECK(sp.L_next == 27);
  CHECK(sp.Y_next == 9);
  CHECK(sp.S_next == 1);
  CHECK(sp.N_next == 3);
  CHECK(sp.b == 5.0);
  CHECK(sp.s == 3.0);
  CHECK(sp.a_next == 23.0);
  CHECK(sp.eps_singular() == doctest::Approx(std::pow(3.0, -5)));
  CHECK(sp.eps_cnr() == doctest::Approx(std::pow(27.0, -3)));
  CHECK(sp.decay_rhs() == doctest::Approx(std::pow(3.0, 1.0 / 8 - 15)));
}

TEST_CASE("parallel map is schedule independent") {
  auto f = [](uint64_t i) { return std::sin(static_cast<double>(i)) * 1e-3; };
  auto one = parallel_map<double>(500, 1, f);
  auto eight = parallel_map<double>(500, 8, f);
  CHECK(one == eight);  // bitwise
}

TEST_CASE("estimator aggregates are identical across worker counts") {
  auto sp = desk_pair(9);
  for (int workers : {1, 4}) {
    McOptions opt;
    opt.workers = workers;
    auto est = estimate_singular_prob(sp, -156.0, 300, strong(7), opt);
    CHECK(est.successes == estimate_singular_prob(sp, -156.0, 300, strong(7), {}).successes);
  }
}

TEST_CASE("singular probability: degenerate and golden cases") {
  auto sp = desk_pair(3);
  McOptions opt;
  opt.workers = 4;
  // E far below the spectrum: every cube is non-singular
  auto far = estimate_singular_prob(sp, -1e6, 200, strong(1), opt);
  CHECK(far.successes == 0);
  CHECK_THROWS_AS(estimate_singular_prob(sp, 0.5, 0, strong(1), opt), std::invalid_argument);

  // seeded goldens at the crossover energy; two seeds agree within joint CIs
  auto sp9 = desk_pair(9);
  auto a = estimate_singular_prob(sp9, -156.0, 2000, strong(2718), opt);
  auto b = estimate_singular_prob(sp9, -156.0, 2000, strong(3141), opt);
  CHECK(a.successes == 1018);
  CHECK(b.successes == 967);
  CHECK(a.ci.lower <= b.ci.upper);
  CHECK(b.ci.lower <= a.ci.upper);
}

TEST_CASE("wegner curve: saturation, uniform bound, holder slope") {
  McOptions opt;
  opt.workers = 4;
  DisorderSpec u1;  // uniform(0,1), lambda 1
  u1.master_seed = 11;
  // threshold beyond the spectral diameter: every realization is resonant
  auto sat = estimate_wegner(1, 9, 2.5, 200, u1, {100.0}, opt);
  CHECK(sat.points[0].est.p_hat == 1.0);

  // mid-band instance of the flat-density bound 2 L eps at eps = 1e-2
  auto cur = estimate_wegner(1, 9, 2.5, 2000, u1, {1e-2}, opt);
  CHECK(cur.points[0].bound == doctest::Approx(2.0 * 9 * 1e-2));
  CHECK(cur.points[0].est.ci.upper <= cur.points[0].bound);

  // rank-1/2 singularity of the holder marginal at the band bottom
  DisorderSpec h;
  h.family = DisorderFamily::Holder;
  h.beta = 0.5;
  h.master_seed = 424242;
  auto slope = estimate_wegner(1, 1, 2.0, 2000, h, {1e-2, 1e-3, 1e-4, 1e-5}, opt);
  CHECK(slope.slope_points == 4);
  CHECK(slope.slope > 0.35);
  CHECK(slope.slope < 0.65);
}

TEST_CASE("two-dimensional probes run through the same estimators") {
  McOptions opt;
  opt.workers = 4;
  DisorderSpec u;
  u.lambda = 10.0;
  u.master_seed = 99;
  auto curve = estimate_wegner(2, 9, 7.0, 200, u, {1e-1, 1e-2}, opt);
  CHECK(curve.points[0].est.successes >= curve.points[1].est.successes);
  CHECK(curve.points[0].bound == doctest::Approx(2.0 * 10 * 81 * 1e-1));
  // decorated norm of a d=2 cube obeys the distance bound inside classify
  auto v = sample(u, 0);
  CubeSpec c{origin(2), 9, 0};
  double dn = dnorm(c, -20.0, v, 9);
  CHECK(std::isfinite(dn));
  CHECK(dn <= 81.0 * 16.0 / assemble(c, v).spectral_distance(-20.0) * (1 + 1e-9));
}

TEST_CASE("cnr failure estimator and the union bound") {
  auto sp = desk_pair(3);
  McOptions opt;
  opt.workers = 4;
  // E far away: no failures
  auto far = estimate_cnr_failure(sp, -1e6, 200, strong(3), opt);
  CHECK(far.est.successes == 0);
  REQUIRE(far.cube_sizes.size() == 8);  // Y_1 - 1 concentric cubes
  CHECK(far.cube_sizes.front() == 9);
  CHECK(far.cube_sizes.back() == 23);

  // seeded golden mid-band; failure count never exceeds the per-cube sum
  auto mid = estimate_cnr_failure(sp, 7.0, 5000, strong(5150), opt);
  CHECK(mid.est.successes == 10);
  uint64_t sum = 0;
  for (auto c : mid.per_cube_not_nr) sum += c;
  CHECK(mid.est.successes <= sum);
  CHECK(sum == 10);
}

TEST_CASE("dominated decay: qualifying, vacuous, and violation-free batches") {
  auto sp = desk_pair(3);
  McOptions opt;
  opt.workers = 4;
  // far energy: hypotheses and conclusion both hold with a huge margin
  auto chk = check_dominated_decay(sp, -1e5, sample(strong(77), 0), opt);
  CHECK(chk.hypotheses_hold);
  CHECK(chk.cnr_ok);
  CHECK(chk.disjoint_singular == 0);
  CHECK(chk.conclusion_holds);
  CHECK(chk.dnorm_value < 1e-30);
  CHECK(!chk.violation());

  // mid-band: tiny cubes are singular, the budget is blown, the check is vacuous
  auto vac = check_dominated_decay(sp, 7.0, sample(strong(77), 1), opt);
  CHECK(!vac.hypotheses_hold);
  CHECK(!vac.violation());

  auto batch = run_dominated_decay_batch(sp, -1e5, 100, strong(78), opt);
  CHECK(batch.qualifying == 100);
  CHECK(batch.violations == 0);
  CHECK(batch.worst_margin < 1e-25);
}

TEST_CASE("radial decay chain report") {
  auto sp = desk_pair(3);
  McOptions opt;
  opt.workers = 1;
  auto rep = check_appendix_chain(sp, -1e5, sample(strong(79), 0), 1e-8, opt);
  REQUIRE(rep.hypotheses_hold);
  CHECK(rep.violations == 0);
  CHECK(rep.f_max_identity_ok);
  REQUIRE(rep.f.size() == 14);  // radii 0..13 for the 27-cube over unit cells
  // F is the running max of f
  for (size_t r = 1; r < rep.F.size(); ++r) CHECK(rep.F[r] >= rep.F[r - 1]);
  // property (B) at r = r' reduces to C_W L_{k+1}^{s_k} >= 1
  bool saw_diag_b = false;
  for (auto& st : rep.steps)
    if (st.property == 'B' && st.r == st.r_to) {
      saw_diag_b = true;
      CHECK(st.rhs >= st.lhs);
      if (st.lhs > 0) CHECK(st.rhs / st.lhs >= 72.0 * std::pow(27.0, 3.0) * (1 - 1e-9));
    }
  CHECK(saw_diag_b);
  // slacks stay below one with real margin
  CHECK(rep.worst_slack_a < 0.5);
  CHECK(rep.worst_slack_b < 1e-3);
  CHECK(rep.worst_slack_c < 0.5);

  auto batch = run_appendix_chain_batch(sp, -1e5, 50, strong(80), 1e-8, opt);
  CHECK(batch.qualifying == 50);
  CHECK(batch.violations == 0);
}

TEST_CASE("empirical recursion verdicts") {
  auto sp = desk_pair(3);
  // all-zero counts: the bound is not contradicted, but nothing is proven
  auto zero = EstimatorResult::from_counts("p", 0, 10000, 0);
  auto rc0 = check_recursion_empirically(sp, zero, zero, zero);
  CHECK(rc0.verdict != RecursionVerdict::Violation);

  // inflated p_{k+1} is flagged as a genuine violation
  auto half = EstimatorResult::from_counts("p", 5000, 10000, 0);
  auto rc1 = check_recursion_empirically(sp, zero, half, zero);
  CHECK(rc1.verdict == RecursionVerdict::Violation);

  // seeded pass at the calibrated crossover energy
  McOptions opt;
  opt.workers = 4;
  auto base = desk_base(3);
  std::vector<ScaleRecord> recs{initial_record(base)};
  recs.push_back(advance_scale(recs.back(), base));
  auto sp1 = ScalePair::from_single(base, recs[1]);
  auto pk = estimate_singular_prob(sp, -17493.8, 2000, strong(1001), opt);
  auto pk1 = estimate_singular_prob(sp1, -17493.8, 2000, strong(1001), opt);
  auto wk1 = estimate_cnr_failure(sp, -17493.8, 2000, strong(1001), opt);
  CHECK(pk.p_hat > 0.005);
  CHECK(pk.p_hat < 0.05);
  auto rc2 = check_recursion_empirically(sp, pk, pk1, wk1.est);
  CHECK(rc2.verdict == RecursionVerdict::Pass);
}

TEST_CASE("eigenfunction-correlator scaling probe") {
  McOptions opt;
  opt.workers = 4;
  // free case: delocalized modes carry full correlation across the chain
  // (parity pairs the endpoint amplitudes), the opposite of the localized trend
  DisorderSpec free_case;
  free_case.lambda = 0.0;
  auto v0 = sample(free_case, 0);
  CubeSpec c9{origin(1), 9, -1};
  double efc_free = efc_pair(v0, {-4}, {4}, cube_sites(c9), 1);
  CHECK(efc_free == doctest::Approx(1.0).epsilon(1e-12));

  // strong disorder: correlators decay and the diagnostic grows with L
  auto curve = efc_scaling_probe(1, {9, 15, 21}, 50, strong(31337), opt);
  REQUIRE(curve.points.size() == 3);
  for (auto& p : curve.points) {
    CHECK(p.efc.mean > 0.0);
    CHECK(p.efc.mean < 0.1);
  }
  CHECK(curve.points.back().diagnostic > curve.points.front().diagnostic);
}
