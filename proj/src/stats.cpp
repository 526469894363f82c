#include "afs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace afs {

namespace {

double ln_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  const int max_iter = 500;
  const double eps = 1e-15, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double bt = std::exp(ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) +
                       a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

// Inverse of I_x(a,b) in x by bisection; monotone, so this is robust.
static double inv_reg_inc_beta(double a, double b, double p) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < p) lo = mid; else hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

BinomialCI clopper_pearson(uint64_t k, uint64_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("clopper_pearson: n must be >= 1");
  if (k > n) throw std::invalid_argument("clopper_pearson: successes > trials");
  double alpha = 1.0 - confidence;
  BinomialCI ci;
  ci.lower = (k == 0) ? 0.0
                      : inv_reg_inc_beta(static_cast<double>(k),
                                         static_cast<double>(n - k + 1), alpha / 2);
  ci.upper = (k == n) ? 1.0
                      : inv_reg_inc_beta(static_cast<double>(k + 1),
                                         static_cast<double>(n - k), 1.0 - alpha / 2);
  return ci;
}

EstimatorResult EstimatorResult::from_counts(std::string name, uint64_t successes,
                                             uint64_t n, uint64_t seed,
                                             std::string params) {
  EstimatorResult r;
  r.name = std::move(name);
  r.n = n;
  r.successes = successes;
  r.p_hat = n ? static_cast<double>(successes) / static_cast<double>(n) : 0.0;
  r.ci = clopper_pearson(successes, n);
  r.master_seed = seed;
  r.params = std::move(params);
  return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

static std::vector<double> ranks(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length vectors, n >= 2");
  auto rx = ranks(x), ry = ranks(y);
  double mx = 0, my = 0;
  for (size_t i = 0; i < rx.size(); ++i) { mx += rx[i]; my += ry[i]; }
  mx /= rx.size(); my /= ry.size();
  double num = 0, dx = 0, dy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

MeanCI mean_ci(const std::vector<double>& xs, double confidence) {
  if (xs.empty()) throw std::invalid_argument("mean_ci: empty sample");
  MeanCI m;
  m.n = xs.size();
  for (double v : xs) m.mean += v;
  m.mean /= static_cast<double>(m.n);
  double var = 0.0;
  for (double v : xs) var += (v - m.mean) * (v - m.mean);
  var /= std::max<size_t>(1, m.n - 1);
  m.stderr_ = std::sqrt(var / static_cast<double>(m.n));
  // two-sided normal quantile; 1.959964 at 95%
  double z = confidence == 0.95 ? 1.959963984540054 : 2.5758293035489004;
  m.lower = m.mean - z * m.stderr_;
  m.upper = m.mean + z * m.stderr_;
  return m;
}

}  // namespace afs
