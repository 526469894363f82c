#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <mpfr.h>

#include "afs/disorder.hpp"
#include "afs/rng.hpp"
#include "afs/stats.hpp"

using namespace afs;

TEST_CASE("philox-backed draws are deterministic in (seed, index, site)") {
  DisorderSpec spec;
  spec.lambda = 10.0;
  spec.master_seed = 42;
  auto v1 = sample(spec, 7);
  auto v2 = sample(spec, 7);
  for (int64_t x = -5; x <= 5; ++x) CHECK(v1.value({x}) == v2.value({x}));
  // distinct indices and distinct seeds decorrelate
  auto v3 = sample(spec, 8);
  DisorderSpec other = spec;
  other.master_seed = 43;
  auto v4 = sample(other, 7);
  CHECK(v1.value({0}) != v3.value({0}));
  CHECK(v1.value({0}) != v4.value({0}));
}

TEST_CASE("site codes separate nearby lattice points") {
  CHECK(site_code({0}) != site_code({1}));
  CHECK(site_code({0, 0}) != site_code({0, 1}));
  CHECK(site_code({0, 0}) != site_code({1, 0}));
  CHECK(site_code({0}) != site_code({0, 0}));  // dimension enters the code
}

TEST_CASE("family transforms of the underlying uniform variable") {
  DisorderSpec u;
  u.a = 0;
  u.b = 1;
  u.lambda = 3.0;
  u.master_seed = 5;
  auto ru = sample(u, 0);
  DisorderSpec h = u;
  h.family = DisorderFamily::Holder;
  h.beta = 0.5;
  auto rh = sample(h, 0);
  for (int64_t x = 0; x < 20; ++x) {
    double base = site_uniform(5, 0, {x});
    CHECK(ru.value({x}) == 3.0 * base);  // uniform(0,1)
    // U^{1/beta} with beta = 1/2
    CHECK(rh.value({x}) == doctest::Approx(3.0 * base * base).epsilon(1e-15));
  }
}

TEST_CASE("holder(1) coincides with uniform(0,1) exactly") {
  DisorderSpec u;
  u.master_seed = 99;
  DisorderSpec h = u;
  h.family = DisorderFamily::Holder;
  h.beta = 1.0;
  auto ru = sample(u, 3), rh = sample(h, 3);
  for (int64_t x = -500; x < 500; ++x) CHECK(ru.value({x}) == rh.value({x}));
}

TEST_CASE("invalid specs are rejected") {
  DisorderSpec bad;
  bad.family = DisorderFamily::Holder;
  bad.beta = 0.0;
  CHECK_THROWS_AS(sample(bad, 0), std::invalid_argument);
  bad.beta = 1.5;
  CHECK_THROWS_AS(sample(bad, 0), std::invalid_argument);
  DisorderSpec neg;
  neg.lambda = -1;
  CHECK_THROWS_AS(sample(neg, 0), std::invalid_argument);
  DisorderSpec flip;
  flip.a = 1;
  flip.b = 0;
  CHECK_THROWS_AS(sample(flip, 0), std::invalid_argument);
}

static std::vector<double> draw_samples(const DisorderSpec& spec, size_t n) {
  auto r = sample(spec, 0);
  std::vector<double> xs;
  xs.reserve(n);
  for (size_t i = 0; i < n; ++i) xs.push_back(r.value({static_cast<int64_t>(i)}));
  return xs;
}

TEST_CASE("empirical CDF matches the marginal within KS 0.01") {
  const size_t n = 100000;
  DisorderSpec u;
  u.master_seed = 101;
  DisorderSpec h;
  h.family = DisorderFamily::Holder;
  h.beta = 0.5;
  h.master_seed = 102;
  DisorderSpec z;
  z.family = DisorderFamily::AlmostZeroOrder;
  z.C = 1.0;
  z.Cp = 1.0;
  z.master_seed = 103;
  for (const auto& spec : {u, h, z}) {
    auto xs = draw_samples(spec, n);
    double d = ks_statistic(xs, [&](double t) { return marginal_cdf(spec, t); });
    INFO("family ", spec.family_name());
    CHECK(d < 0.01);
  }
}

TEST_CASE("continuity modulus formulas") {
  DisorderSpec u;  // uniform(0,1), lambda 1, density 1
  CHECK(continuity_modulus(u, 0.01) == doctest::Approx(0.01));
  DisorderSpec h;
  h.family = DisorderFamily::Holder;
  h.beta = 0.5;
  CHECK(continuity_modulus(h, 0.01) == doctest::Approx(0.1));
  CHECK_THROWS_AS(continuity_modulus(u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(continuity_modulus(u, 0.5), std::invalid_argument);
}

TEST_CASE("almost-zero-order modulus at 1e-6 against a high-precision oracle") {
  // eps^(C / ln|ln eps|) at eps = 1e-6, C = C' = 1, evaluated at 200 bits
  mpfr_t e, le, lle, expo, val;
  mpfr_inits2(200, e, le, lle, expo, val, (mpfr_ptr)nullptr);
  mpfr_set_d(e, 1e-6, MPFR_RNDN);
  mpfr_log(le, e, MPFR_RNDN);
  mpfr_abs(le, le, MPFR_RNDN);
  mpfr_log(lle, le, MPFR_RNDN);
  mpfr_ui_div(expo, 1, lle, MPFR_RNDN);
  mpfr_log(le, e, MPFR_RNDN);
  mpfr_mul(val, le, expo, MPFR_RNDN);
  mpfr_exp(val, val, MPFR_RNDN);
  double oracle = mpfr_get_d(val, MPFR_RNDN);
  mpfr_clears(e, le, lle, expo, val, (mpfr_ptr)nullptr);

  DisorderSpec z;
  z.family = DisorderFamily::AlmostZeroOrder;
  z.C = 1.0;
  z.Cp = 1.0;
  CHECK(continuity_modulus(z, 1e-6) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(5.187e-3).epsilon(1e-3));  // ~ 10^{-2.285}
}

TEST_CASE("almost-zero-order sampler inverts its distribution function") {
  // round trip where the quantile scale is far above the 1e-14 absolute
  // bisection tolerance
  for (double u : {1e-3, 0.01, 0.024, 0.3, 0.9}) {
    double t = azo_quantile(u, 1.0);
    CHECK(azo_cdf(t, 1.0) == doctest::Approx(u).epsilon(1e-6));
  }
  // extreme quantiles collapse to zero within the absolute tolerance
  CHECK(azo_quantile(1e-9, 1.0) < 1e-13);
  // monotone
  double prev = 0.0;
  for (double u = 0.001; u < 1.0; u += 0.02) {
    double t = azo_quantile(u, 1.0);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("almost-zero-order level sets stay within twice the modulus") {
  const size_t n = 100000;
  DisorderSpec z;
  z.family = DisorderFamily::AlmostZeroOrder;
  z.master_seed = 202;
  auto xs = draw_samples(z, n);
  std::sort(xs.begin(), xs.end());
  for (double eps : {1e-2, 1e-3}) {
    size_t best = 0, j = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      while (j < xs.size() && xs[j] <= xs[i] + eps) ++j;
      best = std::max(best, j - i);
    }
    double conc = static_cast<double>(best) / n;
    CHECK(conc <= 2.0 * continuity_modulus(z, eps) + 0.01);
  }
}
