#include "afs/engine.hpp"

#include <stdexcept>

namespace afs {

namespace {

mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Ival iv(const mpq_class& q) { return Ival(q); }
Ival iv(const mpz_class& z) { return Ival(z); }

}  // namespace

// The result is max(t1,t2) + ln((1 + e^{-|t1-t2|})/2); the correction term is
// bracketed by [0, e^{-50}] once the gap certainly exceeds 50.
Ival log_half_sum_exp(const Ival& t1, const Ival& t2) {
  Ival m = Ival::max(t1, t2);
  Ival d = Ival::max(t1 - t2, t2 - t1);  // outer hull of |t1 - t2|
  Ival half(mpq_class(1, 2));
  Ival ed = Ival(50L).certainly_le(d) ? Ival::span(Ival(0L), Ival(3e-22))
                                      : (-d).exp();
  return m + ((Ival(1L) + ed) * half).log();
}

mpz_class integer_root(const mpz_class& x, unsigned long n) {
  if (x < 0) throw std::domain_error("integer_root: negative radicand");
  mpz_class r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
  return r;
}

BaseParams derive_base(int d, const mpq_class& beta, const mpq_class& b0,
                       const mpq_class& p0, const mpz_class& L0) {
  if (d < 1) throw std::invalid_argument("invalid dimension: d must be >= 1");
  if (!(beta > 0 && beta <= 1))
    throw std::invalid_argument("invalid beta: must lie in (0,1]");
  if (!(b0 * beta > d)) throw std::invalid_argument("invalid-b0: need b0 > d/beta");
  if (L0 < 2) throw std::invalid_argument("invalid L0: must be >= 2");

  BaseParams base;
  base.d = d;
  base.beta = beta;
  base.b0 = b0;
  base.p0 = p0;
  base.L0 = L0;
  base.a1 = mpz_pow(mpz_class(3 * base.Y1 - 4), static_cast<unsigned long>(d));  // 23^d

  mpq_class thresh(1);
  thresh /= mpq_class(base.a1 * base.a1);  // a1^{-2d per axis} = 23^{-2d}
  if (!(p0 > 0 && p0 < thresh))
    throw std::invalid_argument("threshold-violated: need 0 < p0 < 23^{-2d}");

  base.eta = (beta * b0 - d) / 2;
  base.s0 = b0 - base.eta / beta;
  base.tau = mpq_class(1, 16 * d);
  base.rho1 = base.eta / 2;

  Ival ln_p0_inv = -iv(base.p0).log();
  Ival t = iv(base.a1).log() / ln_p0_inv;            // ln a1 / ln p0^{-1}
  base.theta0 = (Ival(1L) - Ival(2L) * t) / Ival(3L);
  if (!Ival(0L).certainly_lt(base.theta0) ||
      !base.theta0.certainly_lt(Ival(1L) / Ival(3L)))
    throw std::invalid_argument("invalid theta0: must lie strictly in (0, 1/3)");

  base.sigma0 = ln_p0_inv / Ival::log_z(L0);
  base.tau0 = Ival::min(
      Ival::min(Ival::log_z(mpz_class(base.Y1)) / Ival::log_z(L0),
                Ival(3L) * base.theta0 / (Ival(1L) + Ival(3L) * base.theta0)),
      iv(base.tau));

  // K = min{k >= 1 : (1 + theta0)^k >= 2d / sigma0}
  Ival target = Ival(2L * d) / base.sigma0;
  Ival pw = Ival(1L) + base.theta0;
  Ival acc = pw;
  long k = 1;
  while (!acc.certainly_ge(target)) {
    if (acc.certainly_lt(target)) {
      acc = acc * pw;
      ++k;
      if (k > 1000000) throw std::runtime_error("K iteration did not terminate");
    } else {
      throw std::runtime_error("K determination undecidable at working precision");
    }
  }
  base.K = k;
  return base;
}

L0Threshold l0_threshold(int d, const mpq_class& beta, const mpq_class& b0,
                         const mpq_class& p0) {
  // Reuse validation (L0 plays no role here).
  BaseParams base = derive_base(d, beta, b0, p0, mpz_class(2));
  L0Threshold out;

  auto add_pow = [&out](const std::string& name, const mpq_class& b,
                        const mpq_class& e) {
    L0Threshold::Candidate c;
    c.name = name;
    if (e.get_den() == 1 && e >= 0 && b.get_den() == 1) {
      c.exact = true;
      c.exact_value = mpz_pow(b.get_num(), e.get_num().get_ui());
      c.value = Ival(c.exact_value);
    } else {
      c.value = iv(b).pow_q(e);
    }
    out.candidates.push_back(c);
  };

  mpq_class tau2_inv = mpq_class(256) * d * d;              // 1/tau^2
  add_pow("11^(1/tau^2)", mpq_class(11), tau2_inv);
  add_pow("9^(4(6d+eta)/eta)", mpq_class(9), mpq_class(4) * (6 * d + base.eta) / base.eta);
  add_pow("p0^(-8/(3 eta))", 1 / p0, mpq_class(8) / (3 * base.eta));
  add_pow("p0^(-8/b0)", 1 / p0, mpq_class(8) / b0);

  out.max_value = out.candidates[0].value;
  out.max_name = out.candidates[0].name;
  for (size_t i = 1; i < out.candidates.size(); ++i) {
    if (mpfr_cmp(out.candidates[i].value.hi(), out.max_value.hi()) > 0)
      out.max_name = out.candidates[i].name;
    out.max_value = Ival::max(out.max_value, out.candidates[i].value);
  }
  return out;
}

bool l0_satisfies(const mpz_class& l0, const L0Threshold& th) {
  Ival l0_iv(l0);
  for (const auto& c : th.candidates) {
    if (c.exact) {
      if (l0 < c.exact_value) return false;
    } else if (!l0_iv.certainly_ge(c.value)) {
      return false;
    }
  }
  return true;
}

static void fill_logs(ScaleRecord& r) {
  r.ln_L = Ival::log_z(r.L);
  r.ln_Y = Ival::log_z(r.Y);
  r.S_iv = Ival(r.S);
  r.b_iv = Ival(r.b);
  r.s_iv = Ival(r.s);
  if (r.k >= 1) {
    r.rho_iv = Ival(r.rho);
    r.ln_q = Ival(2L).log() - r.rho_iv * r.ln_L;
  }
}

static void fill_esl(ScaleRecord& r) {
  EslExponents e = esl_exponents(r);
  r.delta = e.delta;
  r.kappa = e.kappa;
  r.delta_lower = e.delta_lower;
  r.delta_defined = e.delta_defined;
  r.kappa_defined = e.kappa_defined;
}

EslExponents esl_exponents(const ScaleRecord& rec) {
  EslExponents out;
  Ival lnln = rec.ln_L.log();  // L >= 3 so ln L > 1 > 0
  Ival ln_b_lnL = rec.b_iv.log() + lnln;
  out.delta_defined = Ival(0L).certainly_lt(ln_b_lnL);
  if (out.delta_defined) out.delta = ln_b_lnL / rec.ln_L;
  Ival ln_sigma_lnL = rec.sigma.log() + lnln;
  out.kappa_defined = Ival(0L).certainly_lt(ln_sigma_lnL);
  if (out.kappa_defined) out.kappa = ln_sigma_lnL / rec.ln_L;
  if (rec.k >= 1) {
    Ival s1 = rec.S_iv + Ival(1L);
    out.delta_lower = (s1.log() - (Ival(3L) / Ival(2L)).log()) / rec.ln_Y;
  }
  return out;
}

ScaleRecord initial_record(const BaseParams& base) {
  ScaleRecord r;
  r.k = 0;
  r.exact_mode = true;
  r.L = base.L0;
  // Conventions for the k = 0 row: the initial regime's constant factors.
  // Y_0 = Y_1 fixes the cell-count factor used by the decorated norm at
  // scale 0; S_0, N_0, a_0 mirror the k <= K block of the parameter table.
  r.Y = base.Y1;
  r.S = base.S1;
  r.N = r.Y - 5 * r.S - 1;
  r.a = base.a1;
  r.b = base.b0;
  r.s = base.s0;
  r.A = 1;
  r.sigma = base.sigma0;
  fill_logs(r);
  fill_esl(r);
  return r;
}

ScaleRecord advance_scale(const ScaleRecord& rec, const BaseParams& base,
                          int exact_k_cap) {
  ScaleRecord n;
  n.k = rec.k + 1;
  const long k1 = n.k;

  if (rec.exact_mode && n.k <= exact_k_cap) {
    n.exact_mode = true;
    if (k1 <= base.K) {
      n.Y = base.Y1;
      n.S = base.S1;
    } else {
      n.Y = integer_root(rec.L, static_cast<unsigned long>(16 * base.d));
      n.S = n.Y / 9;
    }
    n.L = n.Y * rec.L;
    n.N = n.Y - 5 * n.S - 1;
    if (n.N < 3) throw std::runtime_error("scale recursion violated N_k >= 3");
    n.a = mpz_pow(3 * n.Y - 4, static_cast<unsigned long>(base.d));
    n.b = mpq_class(4, 5) * mpq_class(n.N) * rec.b;
    n.s = mpq_class(5, 6) * n.b;
    n.A = mpq_class(4, 5) * mpq_class(n.N) * rec.A;

    if (k1 <= base.K + 1) {
      n.B_iv = Ival(1L) + base.theta0;
      n.D = mpq_class(4, 3);
    } else {
      // One-step delay: the feedback factors at step k+1 are shaped by the
      // singular-cube budget of step k, since the Wegner-side exponent
      // recursion rho_{k+1}/rho_k = b_k/b_{k-1} = (4/5) N_k involves N_k.
      mpq_class f = mpq_class(2, 3) * (mpq_class(rec.S) + 1);
      n.B_iv = Ival(f);
      n.D = f;
    }
    n.D_iv = Ival(n.D);
    n.rho = (k1 == 1) ? base.rho1 : n.D * rec.rho;
    n.sigma = n.B_iv * rec.sigma;
    fill_logs(n);
  } else {
    // Floorless log-space continuation: sizes carried as interval enclosures
    // with floor(x) bracketed by [x-1, x].
    n.exact_mode = false;
    Ival one(1L);
    Ival y_raw = (iv(base.tau) * rec.ln_L).exp();
    Ival Y = Ival::span(Ival::max(y_raw - one, Ival(3L)), y_raw);
    n.ln_Y = Y.log();
    n.ln_L = rec.ln_L + n.ln_Y;
    Ival S = Ival::span(Ival::max(Y / Ival(9L) - one, Ival(1L)), Y / Ival(9L));
    n.S_iv = S;
    Ival Niv = Y - Ival(5L) * S - one;
    n.b_iv = Ival(mpq_class(4, 5)) * Niv * rec.b_iv;
    n.s_iv = Ival(mpq_class(5, 6)) * n.b_iv;
    Ival f = Ival(mpq_class(2, 3)) * (rec.S_iv + one);  // previous scale's budget
    n.B_iv = (k1 <= base.K + 1) ? Ival(1L) + base.theta0 : f;
    n.D_iv = (k1 <= base.K + 1) ? Ival(mpq_class(4, 3)) : f;
    n.rho_iv = n.D_iv * rec.rho_iv;
    n.sigma = n.B_iv * rec.sigma;
    n.ln_q = Ival(2L).log() - n.rho_iv * n.ln_L;
  }
  fill_esl(n);
  return n;
}

// ---- verification passes ----

static std::string num(const Ival& v) { return v.str(12); }

std::vector<CheckRow> verify_growth(const std::vector<ScaleRecord>& recs,
                                    const BaseParams& base) {
  std::vector<CheckRow> rows;
  for (size_t k = 1; k < recs.size(); ++k) {
    const auto& r = recs[k];
    CheckRow sandwich{"YS-sandwich", static_cast<int>(k)};
    if (static_cast<long>(k) <= base.K) {
      sandwich.status = CheckStatus::Skipped;
      sandwich.note = "initial regime: S_k = 1 by definition";
    } else if (r.exact_mode) {
      bool ok = 10 * r.S >= r.Y && 9 * r.S <= r.Y;
      sandwich.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
      sandwich.lhs = r.Y.get_str();
      sandwich.rhs = r.S.get_str();
    } else {
      sandwich.status = CheckStatus::Undecided;
      sandwich.note = "log-mode record";
    }
    rows.push_back(sandwich);

    if (static_cast<long>(k) >= base.K + 2) {
      CheckRow inc{"Y-S-increasing", static_cast<int>(k)};
      if (r.exact_mode && recs[k - 1].exact_mode) {
        bool ok = r.Y > recs[k - 1].Y && r.S > recs[k - 1].S;
        inc.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
      } else {
        bool ok = recs[k - 1].ln_Y.certainly_lt(r.ln_Y);
        inc.status = ok ? CheckStatus::Pass : CheckStatus::Undecided;
      }
      rows.push_back(inc);
    }
  }
  return rows;
}

std::vector<CheckRow> verify_wegner_chain(const std::vector<ScaleRecord>& recs,
                                          const BaseParams& base) {
  std::vector<CheckRow> rows;
  Ival ln2 = Ival(2L).log();
  for (size_t k = 0; k + 1 < recs.size(); ++k) {
    const auto& cur = recs[k];
    const auto& nxt = recs[k + 1];
    // (Y_{k+1} - 1) L_{k+1}^d L_{k+1}^{-beta s_k} <= 2 L_{k+1}^{-rho_{k+1}}
    CheckRow row{"wegner-closure", static_cast<int>(k + 1)};
    Ival ln_count = nxt.exact_mode ? Ival::log_z(nxt.Y - 1) : nxt.ln_Y;
    Ival lhs = ln_count + (Ival(long(base.d)) - Ival(base.beta) * cur.s_iv) * nxt.ln_L;
    Ival rhs = ln2 - nxt.rho_iv * nxt.ln_L;
    row.lhs = num(lhs);
    row.rhs = num(rhs);
    if (lhs.certainly_le(rhs)) row.status = CheckStatus::Pass;
    else if (rhs.certainly_lt(lhs)) row.status = CheckStatus::Fail;
    else row.status = CheckStatus::Undecided;
    rows.push_back(row);

    if (k >= 1) {
      CheckRow der{"rho-le-wegner-exponent", static_cast<int>(k + 1)};
      // certified rho_{k+1} must not exceed the Wegner-derived beta b_k / 8
      if (cur.exact_mode && nxt.exact_mode) {
        mpq_class wg = base.beta * cur.b / 8;
        der.status = (nxt.rho <= wg) ? CheckStatus::Pass : CheckStatus::Fail;
        der.lhs = nxt.rho.get_str();
        der.rhs = wg.get_str();
      } else {
        Ival wg = Ival(base.beta) * cur.b_iv / Ival(8L);
        der.status = nxt.rho_iv.certainly_le(wg) ? CheckStatus::Pass : CheckStatus::Undecided;
      }
      rows.push_back(der);
    }
  }
  return rows;
}

std::vector<CheckRow> verify_probability_recursion(std::vector<ScaleRecord>& recs,
                                                   const BaseParams& base) {
  std::vector<CheckRow> rows;
  Ival ln2 = Ival(2L).log();
  for (size_t k = 0; k + 1 < recs.size(); ++k) {
    auto& cur = recs[k];
    auto& nxt = recs[k + 1];
    Ival s1 = nxt.exact_mode ? Ival(mpz_class(nxt.S + 1)) : nxt.S_iv + Ival(1L);
    // ln a = d ln(3Y-4); bracketed as d (ln Y + [ln 2, ln 3]) when Y is interval-only
    Ival ln_a = nxt.exact_mode
                    ? Ival::log_z(nxt.a)
                    : Ival(long(base.d)) *
                          (nxt.ln_Y + Ival::span(Ival(2L).log(), Ival(3L).log()));
    // t1 = (S_{k+1}+1) ln(a_{k+1} L_k^{-sigma_k}), t2 = ln(q_{k+1})
    Ival t1 = s1 * (ln_a - cur.sigma * cur.ln_L);
    Ival t2 = nxt.ln_q;
    Ival lhs = log_half_sum_exp(t1, t2);
    Ival rhs = -(nxt.sigma * nxt.ln_L);

    CheckRow row{"prob-recursion-closure", static_cast<int>(k + 1)};
    row.lhs = num(lhs);
    row.rhs = num(rhs);
    if (lhs.certainly_le(rhs)) row.status = CheckStatus::Pass;
    else if (rhs.certainly_lt(lhs)) row.status = CheckStatus::Fail;
    else row.status = CheckStatus::Undecided;
    rows.push_back(row);

    // regime label: A/B by k < K, 1/2 by the dominating summand
    const char* ab = (static_cast<long>(k) < base.K) ? "A" : "B";
    const char* sub = t1.certainly_le(t2) ? "2" : (t2.certainly_le(t1) ? "1" : (t1.mid() >= t2.mid() ? "1" : "2"));
    nxt.regime = std::string(ab) + sub;
  }
  for (size_t k = 1; k < recs.size(); ++k) {
    const auto& r = recs[k];
    CheckRow row{"sigma-le-rho", static_cast<int>(k)};
    row.lhs = num(r.sigma);
    row.rhs = num(r.rho_iv);
    if (r.sigma.certainly_le(r.rho_iv)) row.status = CheckStatus::Pass;
    else if (r.rho_iv.certainly_lt(r.sigma)) row.status = CheckStatus::Fail;
    else row.status = CheckStatus::Undecided;
    rows.push_back(row);
    if (k >= 2) {
      CheckRow bd{"B-le-D", static_cast<int>(k)};
      if (static_cast<long>(k) >= base.K + 2) {
        // beyond the switch point B and D are the same rational
        bd.status = CheckStatus::Pass;
        bd.note = "B = D by construction";
      } else if (r.B_iv.certainly_le(r.D_iv)) {
        bd.status = CheckStatus::Pass;
      } else if (r.D_iv.certainly_lt(r.B_iv)) {
        bd.status = CheckStatus::Fail;
      } else {
        bd.status = CheckStatus::Undecided;
      }
      rows.push_back(bd);
    }
  }
  return rows;
}

std::vector<CheckRow> verify_esl_convergence(const std::vector<ScaleRecord>& recs,
                                             const BaseParams& base) {
  std::vector<CheckRow> rows;
  Ival ratio_cap = Ival(mpq_class(97, 100));
  for (size_t k = 0; k + 1 < recs.size(); ++k) {
    if (static_cast<long>(k) < base.K + 2) continue;
    const auto& a = recs[k];
    const auto& b = recs[k + 1];
    if (!a.delta_defined || !b.delta_defined || !a.kappa_defined || !b.kappa_defined) {
      rows.push_back({"esl-monotone", static_cast<int>(k + 1), CheckStatus::Fail, "", "",
                      "exponent undefined"});
      continue;
    }
    CheckRow mono{"esl-monotone", static_cast<int>(k + 1)};
    bool up = a.delta.certainly_lt(b.delta) && a.kappa.certainly_lt(b.kappa);
    mono.status = up ? CheckStatus::Pass : CheckStatus::Fail;
    mono.lhs = num(a.delta);
    mono.rhs = num(b.delta);
    rows.push_back(mono);

    CheckRow gap{"esl-gap-ratio", static_cast<int>(k + 1)};
    Ival one(1L);
    Ival r = (one - b.delta) / (one - a.delta);
    gap.lhs = num(r);
    gap.rhs = "0.97";
    if (r.certainly_le(ratio_cap)) gap.status = CheckStatus::Pass;
    else if (ratio_cap.certainly_lt(r)) gap.status = CheckStatus::Fail;
    else gap.status = CheckStatus::Undecided;
    rows.push_back(gap);
  }
  return rows;
}

Certificate run_certificate(const BaseParams& base, int k_max, int exact_k_cap) {
  Certificate cert;
  cert.base = base;
  cert.records.push_back(initial_record(base));
  for (int k = 0; k < k_max; ++k) {
    try {
      cert.records.push_back(advance_scale(cert.records.back(), base, exact_k_cap));
    } catch (const std::runtime_error& e) {
      // initial scale too small for the recursion to continue: a checked
      // failure, not a crash
      cert.checks.push_back({"recursion-constructible", k + 1, CheckStatus::Fail, "", "",
                             e.what()});
      break;
    }
  }
  if (!cert.records.back().exact_mode) cert.mode = "exact+log";

  auto append = [&cert](std::vector<CheckRow> rows) {
    for (auto& r : rows) cert.checks.push_back(std::move(r));
  };
  append(verify_growth(cert.records, base));
  append(verify_wegner_chain(cert.records, base));
  append(verify_probability_recursion(cert.records, base));
  append(verify_esl_convergence(cert.records, base));

  cert.overall = true;
  for (auto& c : cert.checks) {
    if (c.status == CheckStatus::Fail || c.status == CheckStatus::Undecided) {
      cert.overall = false;
      if (cert.failure_reason.empty())
        cert.failure_reason = c.name + " at k=" + std::to_string(c.k);
    }
  }
  return cert;
}

}  // namespace afs
