#include "afs/disorder.hpp"

#include <cmath>
#include <stdexcept>

#include "afs/rng.hpp"

namespace afs {

// ---- Philox 4x32-10 ----

namespace {
constexpr uint32_t kW32A = 0x9E3779B9u;
constexpr uint32_t kW32B = 0xBB67AE85u;
constexpr uint32_t kM4x32A = 0xD2511F53u;
constexpr uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  lo = static_cast<uint32_t>(p);
  hi = static_cast<uint32_t>(p >> 32);
}

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  uint32_t lo0, hi0, lo1, hi1;
  mul_hilo(kM4x32A, c[0], lo0, hi0);
  mul_hilo(kM4x32B, c[2], lo1, hi1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, key);
    key[0] += kW32A;
    key[1] += kW32B;
  }
  return counter;
}

uint64_t site_code(const Point& p) {
  uint64_t h = 0x243F6A8885A308D3ull ^ (0x100000001B3ull * p.size());
  for (int64_t c : p) h = splitmix64(h ^ static_cast<uint64_t>(c));
  return h;
}

static double to_unit_double(const std::array<uint32_t, 4>& w) {
  uint64_t x = (static_cast<uint64_t>(w[1]) << 32) | w[0];
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double counter_uniform(uint64_t master_seed, uint64_t stream, uint64_t counter) {
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(master_seed),
                                 static_cast<uint32_t>(master_seed >> 32)};
  std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(counter), static_cast<uint32_t>(counter >> 32),
      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  return to_unit_double(philox4x32(ctr, key));
}

double site_uniform(uint64_t master_seed, uint64_t realization_index, const Point& site) {
  return counter_uniform(master_seed, site_code(site), realization_index);
}

// ---- disorder families ----

void DisorderSpec::validate() const {
  if (lambda < 0) throw std::invalid_argument("invalid disorder spec: lambda < 0");
  switch (family) {
    case DisorderFamily::Uniform:
      if (!(a < b)) throw std::invalid_argument("invalid disorder spec: need a < b");
      break;
    case DisorderFamily::Holder:
      if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("invalid disorder spec: holder beta must lie in (0,1]");
      break;
    case DisorderFamily::AlmostZeroOrder:
      if (!(C > 0.0 && Cp > 0.0))
        throw std::invalid_argument("invalid disorder spec: almost_zero_order needs C, C' > 0");
      break;
  }
}

std::string DisorderSpec::family_name() const {
  switch (family) {
    case DisorderFamily::Uniform: return "uniform";
    case DisorderFamily::Holder: return "holder";
    case DisorderFamily::AlmostZeroOrder: return "almost_zero_order";
  }
  return "?";
}

// Distribution function of the base (lambda = 1) almost-zero-order variable.
// Curved branch t^(C/ln ln(1/t)) on (0, t*], t* = e^{-e^2}; linear on [t*, 1].
static const double kAzoKnee = std::exp(-std::exp(2.0));

double azo_cdf(double t, double C) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (t <= kAzoKnee) {
    double s = std::log(1.0 / t);         // >= e^2
    return std::pow(t, C / std::log(s));  // = exp(-C s / ln s), increasing in t
  }
  double fk = std::exp(-C * std::exp(2.0) / 2.0);  // value at the knee
  return fk + (1.0 - fk) * (t - kAzoKnee) / (1.0 - kAzoKnee);
}

double azo_quantile(double u, double C) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double fk = std::exp(-C * std::exp(2.0) / 2.0);
  if (u >= fk)
    return kAzoKnee + (u - fk) * (1.0 - kAzoKnee) / (1.0 - fk);
  double lo = 0.0, hi = kAzoKnee;
  while (hi - lo > 1e-14) {
    double mid = 0.5 * (lo + hi);
    if (azo_cdf(mid, C) < u) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

DisorderRealization sample(const DisorderSpec& spec, uint64_t realization_index) {
  spec.validate();
  return DisorderRealization{spec, realization_index};
}

double DisorderRealization::value(const Point& site) const {
  double u = site_uniform(spec.master_seed, realization_index, site);
  switch (spec.family) {
    case DisorderFamily::Uniform:
      return spec.lambda * (spec.a + (spec.b - spec.a) * u);
    case DisorderFamily::Holder:
      // pow(u, 1) is exact, so holder(1) coincides with uniform(0,1) bitwise
      return spec.beta == 1.0 ? spec.lambda * u
                              : spec.lambda * std::pow(u, 1.0 / spec.beta);
    case DisorderFamily::AlmostZeroOrder:
      return spec.lambda * azo_quantile(u, spec.C);
  }
  return 0.0;
}

double marginal_cdf(const DisorderSpec& spec, double t) {
  const double l = spec.lambda;
  if (l == 0.0) return t >= 0.0 ? 1.0 : 0.0;
  switch (spec.family) {
    case DisorderFamily::Uniform: {
      double x = (t / l - spec.a) / (spec.b - spec.a);
      return x <= 0 ? 0.0 : (x >= 1 ? 1.0 : x);
    }
    case DisorderFamily::Holder: {
      double x = t / l;
      return x <= 0 ? 0.0 : (x >= 1 ? 1.0 : std::pow(x, spec.beta));
    }
    case DisorderFamily::AlmostZeroOrder:
      return azo_cdf(t / l, spec.C);
  }
  return 0.0;
}

double continuity_modulus(const DisorderSpec& spec, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("continuity_modulus: eps must lie in (0, 1/2)");
  switch (spec.family) {
    case DisorderFamily::Uniform:
      return std::min(1.0, eps / (spec.lambda * (spec.b - spec.a)));
    case DisorderFamily::Holder:
      return std::min(1.0, std::pow(eps / spec.lambda, spec.beta));
    case DisorderFamily::AlmostZeroOrder: {
      double e = eps / spec.lambda;
      if (e >= 1.0) return 1.0;
      double lnln = std::log(std::abs(std::log(e)));
      if (lnln <= 0.0) return 1.0;  // formula degenerates near eps ~ 1/e; trivial bound
      return std::min(1.0, spec.Cp * std::pow(e, spec.C / lnln));
    }
  }
  return 1.0;
}

}  // namespace afs
