#include "afs/mc.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "afs/reduction.hpp"

namespace afs {

template <typename R>
std::vector<R> parallel_map(uint64_t n, int workers, const std::function<R(uint64_t)>& f) {
  std::vector<R> out(n);
  if (workers <= 1) {
    for (uint64_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<uint64_t> next{0};
  auto run = [&] {
    while (true) {
      uint64_t i = next.fetch_add(1);
      if (i >= n) break;
      out[i] = f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  return out;
}

template std::vector<char> parallel_map<char>(uint64_t, int, const std::function<char(uint64_t)>&);
template std::vector<double> parallel_map<double>(uint64_t, int, const std::function<double(uint64_t)>&);
template std::vector<uint32_t> parallel_map<uint32_t>(uint64_t, int, const std::function<uint32_t(uint64_t)>&);
template std::vector<LemmaCheck> parallel_map<LemmaCheck>(uint64_t, int, const std::function<LemmaCheck(uint64_t)>&);
template std::vector<ChainReport> parallel_map<ChainReport>(uint64_t, int, const std::function<ChainReport(uint64_t)>&);

double ScalePair::eps_singular() const { return std::pow(static_cast<double>(L), -b); }
double ScalePair::eps_cnr() const { return std::pow(static_cast<double>(L_next), -s); }
double ScalePair::decay_rhs() const {
  return std::pow(static_cast<double>(L), d / 8.0 - b * static_cast<double>(N_next));
}

ScalePair ScalePair::from_records(const BaseParams& base, const ScaleRecord& cur,
                                  const ScaleRecord& nxt) {
  if (!cur.exact_mode || !nxt.exact_mode)
    throw std::invalid_argument("ScalePair: desk-scale probes need exact-mode records");
  ScalePair sp;
  sp.d = base.d;
  sp.k = cur.k;
  sp.L = cur.L.get_si();
  sp.Y = cur.Y.get_si();
  sp.L_next = nxt.L.get_si();
  sp.Y_next = nxt.Y.get_si();
  sp.S_next = nxt.S.get_si();
  sp.N_next = nxt.N.get_si();
  sp.b = cur.b.get_d();
  sp.s = cur.s.get_d();
  sp.a_next = nxt.a.get_d();
  return sp;
}

ScalePair ScalePair::from_single(const BaseParams& base, const ScaleRecord& cur) {
  if (!cur.exact_mode)
    throw std::invalid_argument("ScalePair: desk-scale probes need exact-mode records");
  ScalePair sp;
  sp.d = base.d;
  sp.k = cur.k;
  sp.L = cur.L.get_si();
  sp.Y = cur.Y.get_si();
  sp.L_next = sp.L;
  sp.Y_next = cur.Y.get_si();
  sp.S_next = cur.S.get_si();
  sp.N_next = cur.N.get_si();
  sp.b = cur.b.get_d();
  sp.s = cur.s.get_d();
  sp.a_next = cur.a.get_d();
  return sp;
}

static std::string param_echo(const ScalePair& sp, double e, const DisorderSpec& dis) {
  std::ostringstream os;
  os << "d=" << sp.d << " k=" << sp.k << " L=" << sp.L << " L_next=" << sp.L_next
     << " b=" << sp.b << " s=" << sp.s << " E=" << e << " family=" << dis.family_name()
     << " lambda=" << dis.lambda;
  return os.str();
}

EstimatorResult estimate_singular_prob(const ScalePair& sp, double e, uint64_t n,
                                       const DisorderSpec& dis, const McOptions& opt,
                                       std::vector<char>* out_flags) {
  if (n < 1) throw std::invalid_argument("estimate_singular_prob: n must be >= 1");
  CubeSpec cube{origin(sp.d), sp.L, sp.k};
  const double eps = sp.eps_singular();
  auto worker = [&](uint64_t i) -> char {
    auto v = sample(dis, i);
    return classify_NS(cube, e, v, eps, sp.Y, opt.op) ? 0 : 1;
  };
  auto flags = parallel_map<char>(n, opt.workers, worker);
  uint64_t hits = 0;
  for (char f : flags) hits += f;
  if (out_flags) *out_flags = std::move(flags);
  return EstimatorResult::from_counts("singular_prob", hits, n, dis.master_seed,
                                      param_echo(sp, e, dis));
}

WegnerCurve estimate_wegner(int d, int64_t l, double e, uint64_t n,
                            const DisorderSpec& dis, const std::vector<double>& eps_grid,
                            const McOptions& opt) {
  if (n < 1 || eps_grid.empty()) throw std::invalid_argument("estimate_wegner: bad arguments");
  CubeSpec cube{origin(d), l, -1};
  auto dists = parallel_map<double>(n, opt.workers, [&](uint64_t i) {
    auto v = sample(dis, i);
    return assemble(cube, v).spectral_distance(e, opt.op.dense_cap);
  });
  WegnerCurve curve;
  double beta = 1.0, c = 0.0;
  if (dis.family == DisorderFamily::Uniform) {
    // Lipschitz Wegner constant for a flat density: C = 2 / density
    c = 2.0 * dis.lambda * (dis.b - dis.a);
  } else if (dis.family == DisorderFamily::Holder) {
    beta = dis.beta;
  }
  double ld = std::pow(static_cast<double>(l), d);
  for (double eps : eps_grid) {
    uint64_t hits = 0;
    for (double dist : dists) hits += (dist < eps);
    WegnerPoint p;
    p.eps = eps;
    p.est = EstimatorResult::from_counts("wegner_not_nr", hits, n, dis.master_seed,
                                         "L=" + std::to_string(l) + " eps=" + std::to_string(eps));
    p.bound = c > 0 ? c * ld * std::pow(eps, beta) : 0.0;
    curve.points.push_back(p);
  }
  // log-log slope over points with nonzero counts
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (auto& p : curve.points) {
    if (p.est.successes == 0) continue;
    double x = std::log(p.eps), y = std::log(p.est.p_hat);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  curve.slope_points = m;
  if (m >= 2) curve.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return curve;
}

CnrFailure estimate_cnr_failure(const ScalePair& sp, double e, uint64_t n,
                                const DisorderSpec& dis, const McOptions& opt) {
  if (n < 1) throw std::invalid_argument("estimate_cnr_failure: n must be >= 1");
  const double eps = sp.eps_cnr();
  const int64_t n_cubes = sp.Y_next - 1;
  auto per = parallel_map<uint32_t>(n, opt.workers, [&](uint64_t i) -> uint32_t {
    auto v = sample(dis, i);
    auto res = classify_CNR(origin(sp.d), sp.cell(), sp.Y_next, e, v, eps, opt.op);
    uint32_t mask = res.cnr ? 0 : 1u;  // bit 0: failure flag
    for (size_t j = 0; j < res.nr.size(); ++j)
      if (!res.nr[j]) mask |= 1u << (j + 1);
    return mask;
  });
  CnrFailure out;
  out.per_cube_not_nr.assign(n_cubes, 0);
  uint64_t fails = 0;
  for (uint32_t mask : per) {
    fails += mask & 1u;
    for (int64_t j = 0; j < n_cubes; ++j)
      if (mask & (1u << (j + 1))) ++out.per_cube_not_nr[j];
  }
  out.est = EstimatorResult::from_counts("cnr_failure", fails, n, dis.master_seed,
                                         param_echo(sp, e, dis));
  {
    const int64_t kk = (sp.Y_next - 1) / 2;
    for (int64_t r = kk; r <= 3 * kk - 1; ++r) out.cube_sizes.push_back((2 * r + 1) * sp.cell());
  }
  return out;
}

// Admissible centers whose scale-k cube fits inside the ambient scale-(k+1) cube.
static std::vector<Point> admissible_subcube_centers(const ScalePair& sp) {
  CubeSpec ambient{origin(sp.d), sp.L_next, sp.k + 1};
  const int64_t reach = ambient.radius() - (sp.L - 1) / 2;
  std::vector<Point> out;
  const int64_t m = reach / sp.cell();
  CubeSpec grid{origin(sp.d), 2 * m + 1, -1};
  for (auto& q : cube_sites(grid)) {
    Point c(q);
    for (auto& x : c) x *= sp.cell();
    out.push_back(c);
  }
  return out;
}

LemmaCheck check_dominated_decay(const ScalePair& sp, double e,
                                 const DisorderRealization& v, const McOptions& opt) {
  LemmaCheck chk;
  chk.realization_index = v.realization_index;
  auto cnr = classify_CNR(origin(sp.d), sp.cell(), sp.Y_next, e, v, sp.eps_cnr(), opt.op);
  chk.cnr_ok = cnr.cnr;

  std::vector<Point> singular;
  const double eps_s = sp.eps_singular();
  for (auto& c : admissible_subcube_centers(sp)) {
    CubeSpec cube{c, sp.L, sp.k};
    if (!classify_NS(cube, e, v, eps_s, sp.Y, opt.op)) singular.push_back(c);
  }
  auto dc = max_disjoint_count(singular, sp.L);
  chk.disjoint_singular = dc.count;
  chk.disjoint_exact = dc.exact;
  chk.hypotheses_hold = chk.cnr_ok && dc.count <= sp.S_next;

  CubeSpec ambient{origin(sp.d), sp.L_next, sp.k + 1};
  chk.dnorm_value = dnorm(ambient, e, v, sp.Y_next, opt.op);
  chk.dnorm_bound = sp.decay_rhs();
  chk.conclusion_holds = chk.dnorm_value <= chk.dnorm_bound;
  return chk;
}

ChainReport check_appendix_chain(const ScalePair& sp, double e,
                                 const DisorderRealization& v, double rel_tol,
                                 const McOptions& opt) {
  ChainReport rep;
  rep.realization_index = v.realization_index;

  CubeSpec ambient{origin(sp.d), sp.L_next, sp.k + 1};
  auto g = skeleton(ambient, sp.cell());
  auto gamma = annulus_two_layers(ambient);
  auto h = assemble(ambient, v);
  if (h.spectral_distance(e, opt.op.dense_cap) < kNearSingularTol) {
    rep.hypotheses_hold = false;  // vacuous: near-singular energy
    return rep;
  }

  // radial profile f(r) = max over layer-r cells of ||1_Gamma G chi_cell||
  const int big_r = g.max_radius;
  rep.f.assign(big_r + 1, 0.0);
  for (int r = 0; r <= big_r; ++r) {
    double fr = 0.0;
    for (int vi : g.layers[r]) {
      CubeSpec cell{g.vertices[vi], sp.cell(), sp.k};
      Eigen::MatrixXd blk = h.green_block(e, gamma, cube_sites(cell));
      Eigen::BDCSVD<Eigen::MatrixXd> svd(blk);
      fr = std::max(fr, svd.singularValues().size() ? svd.singularValues()[0] : 0.0);
    }
    rep.f[r] = fr;
  }
  rep.F.assign(big_r + 1, 0.0);
  double running = 0.0;
  for (int r = 0; r <= big_r; ++r) {
    running = std::max(running, rep.f[r]);
    rep.F[r] = running;
  }
  for (int r = 0; r <= big_r; ++r) {
    double m = 0.0;
    for (int rr = 0; rr <= r; ++rr) m = std::max(m, rep.f[rr]);
    if (m != rep.F[r]) rep.f_max_identity_ok = false;
  }

  // vertex singularity where the scale-k cube fits inside the ambient
  const int64_t r_classifiable = (ambient.radius() - (sp.L - 1) / 2) / sp.cell();
  const double eps_s = sp.eps_singular();
  std::vector<char> layer_ns(big_r + 1, 0);
  for (int r = 0; r <= std::min<int64_t>(big_r, r_classifiable); ++r) {
    bool all_ns = true;
    for (int vi : g.layers[r]) {
      CubeSpec cube{g.vertices[vi], sp.L, sp.k};
      if (!classify_NS(cube, e, v, eps_s, sp.Y, opt.op)) { all_ns = false; break; }
    }
    layer_ns[r] = all_ns;
  }

  auto hyp = check_dominated_decay(sp, e, v, opt);
  rep.hypotheses_hold = hyp.hypotheses_hold;
  if (!rep.hypotheses_hold) return rep;

  const double cw = c_wk(ambient, sp.Y, opt.op);  // C_{W,k}, scale-k constant
  const double l_pow_b = std::pow(static_cast<double>(sp.L), -sp.b);
  const double l1_pow_s = std::pow(static_cast<double>(sp.L_next), sp.s);
  const int64_t kk = (sp.Y_next - 1) / 2;
  const int r_lo = static_cast<int>(kk), r_hi = static_cast<int>(3 * kk - 1);

  auto record = [&](char prop, int r, int r_to, double lhs, double rhs, double& worst) {
    ChainStep st{prop, r, r_to, lhs, rhs, lhs <= rhs * (1.0 + rel_tol)};
    if (!st.holds) ++rep.violations;
    if (rhs > 0) worst = std::max(worst, lhs / rhs);
    rep.steps.push_back(st);
  };

  // (A): a non-singular radius decays by C_W^{-1} L^{-b} into its neighborhood
  for (int r = r_lo; r <= r_hi; ++r) {
    if (r > r_classifiable || !layer_ns[r]) continue;
    double nb = 0.0;
    for (int rr = std::max(0, r - 1); rr <= std::min(big_r, r + 1); ++rr)
      nb = std::max(nb, rep.f[rr]);
    record('A', r, r, rep.f[r], (1.0 / cw) * l_pow_b * nb, rep.worst_slack_a);
  }
  // (B): a jump to any non-resonant radius r' costs at most C_W L_{k+1}^{s_k}
  for (int rp = r_lo; rp <= r_hi; ++rp)
    for (int r = 0; r <= rp; ++r)
      record('B', r, rp, rep.f[r], cw * l1_pow_s * rep.f[rp], rep.worst_slack_b);
  // (C): clearing a singular stretch: F(r) <= C_W^{-1} L^{-2b} L_{k+1}^{s} F(r'+6).
  // The non-singular buffer [r'+3, r'+5] must stay inside I, where the
  // one-step decay (A) applies; cells beyond I touch the boundary annulus.
  for (int rp = r_lo; rp + 5 <= r_hi; ++rp) {
    if (rp + 6 > big_r || rp + 5 > r_classifiable) continue;
    bool clear = layer_ns[rp + 3] && layer_ns[rp + 4] && layer_ns[rp + 5];
    if (!clear) continue;
    double c_const = (1.0 / cw) * l_pow_b * l_pow_b * l1_pow_s;
    for (int r = 0; r <= rp + 5; ++r)
      record('C', r, rp + 6, rep.F[r], c_const * rep.F[rp + 6], rep.worst_slack_c);
  }
  return rep;
}

std::vector<LemmaCheck> dominated_decay_checks(const ScalePair& sp, double e, uint64_t n,
                                               const DisorderSpec& dis, const McOptions& opt) {
  return parallel_map<LemmaCheck>(n, opt.workers, [&](uint64_t i) {
    return check_dominated_decay(sp, e, sample(dis, i), opt);
  });
}

BatchSummary summarize(const std::vector<LemmaCheck>& checks) {
  BatchSummary s;
  s.n = checks.size();
  for (auto& c : checks) {
    if (!c.hypotheses_hold) continue;
    ++s.qualifying;
    if (c.violation()) ++s.violations;
    if (c.dnorm_bound > 0) s.worst_margin = std::max(s.worst_margin, c.dnorm_value / c.dnorm_bound);
  }
  return s;
}

BatchSummary run_dominated_decay_batch(const ScalePair& sp, double e, uint64_t n,
                                       const DisorderSpec& dis, const McOptions& opt) {
  return summarize(dominated_decay_checks(sp, e, n, dis, opt));
}

std::vector<ChainReport> appendix_chain_reports(const ScalePair& sp, double e, uint64_t n,
                                                const DisorderSpec& dis, double rel_tol,
                                                const McOptions& opt) {
  return parallel_map<ChainReport>(n, opt.workers, [&](uint64_t i) {
    return check_appendix_chain(sp, e, sample(dis, i), rel_tol, opt);
  });
}

ChainBatchSummary summarize(const std::vector<ChainReport>& reports) {
  ChainBatchSummary s;
  s.n = reports.size();
  for (auto& r : reports) {
    if (!r.hypotheses_hold) continue;
    ++s.qualifying;
    s.violations += r.violations;
    s.worst_a = std::max(s.worst_a, r.worst_slack_a);
    s.worst_b = std::max(s.worst_b, r.worst_slack_b);
    s.worst_c = std::max(s.worst_c, r.worst_slack_c);
  }
  return s;
}

ChainBatchSummary run_appendix_chain_batch(const ScalePair& sp, double e, uint64_t n,
                                           const DisorderSpec& dis, double rel_tol,
                                           const McOptions& opt) {
  return summarize(appendix_chain_reports(sp, e, n, dis, rel_tol, opt));
}

RecursionCheck check_recursion_empirically(const ScalePair& sp,
                                           const EstimatorResult& p_k,
                                           const EstimatorResult& p_k1,
                                           const EstimatorResult& w_k1) {
  RecursionCheck rc;
  double term = sp.a_next * p_k.ci.upper;
  rc.rhs = 0.5 * std::pow(term, static_cast<double>(sp.S_next + 1)) + 0.5 * w_k1.ci.upper;
  rc.lhs_upper = p_k1.ci.upper;
  rc.lhs_lower = p_k1.ci.lower;
  if (rc.lhs_upper <= rc.rhs) {
    rc.verdict = RecursionVerdict::Pass;
  } else if (rc.lhs_lower > rc.rhs) {
    rc.verdict = RecursionVerdict::Violation;
    rc.note = "lower CI of p_{k+1} exceeds the recursion bound";
  } else {
    rc.verdict = RecursionVerdict::Inconclusive;
    rc.note = "CI straddles the bound";
  }
  return rc;
}

EfcCurve efc_scaling_probe(int d, const std::vector<int64_t>& l_list, uint64_t n,
                           const DisorderSpec& dis, const McOptions& opt) {
  EfcCurve curve;
  for (int64_t l : l_list) {
    CubeSpec cube{origin(d), l, -1};
    Point x = origin(d), y = origin(d);
    x[0] = -cube.radius();
    y[0] = cube.radius();
    auto sites = cube_sites(cube);
    auto vals = parallel_map<double>(n, opt.workers, [&](uint64_t i) {
      return efc_pair(sample(dis, i), x, y, sites, d);
    });
    EfcPoint p;
    p.l = l;
    p.efc = mean_ci(vals);
    p.diagnostic = std::log(std::log(1.0 / p.efc.mean)) / std::log(static_cast<double>(l));
    curve.points.push_back(p);
  }
  std::vector<double> ls, diags;
  for (auto& p : curve.points) {
    ls.push_back(static_cast<double>(p.l));
    diags.push_back(p.diagnostic);
  }
  if (ls.size() >= 2) curve.spearman_l = spearman(ls, diags);
  return curve;
}

}  // namespace afs
