#include "afs/ival.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <stdexcept>

namespace afs {

void Ival::init() {
  mpfr_init2(lo_, kIvalPrec);
  mpfr_init2(hi_, kIvalPrec);
}

Ival::Ival() {
  init();
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Ival::Ival(const Ival& o) {
  init();
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Ival::Ival(Ival&& o) noexcept {
  init();
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Ival& Ival::operator=(const Ival& o) {
  if (this != &o) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Ival& Ival::operator=(Ival&& o) noexcept {
  if (this != &o) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  return *this;
}

Ival::~Ival() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Ival::Ival(long v) {
  init();
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Ival::Ival(double v) {
  init();
  mpfr_set_d(lo_, v, MPFR_RNDD);
  mpfr_set_d(hi_, v, MPFR_RNDU);
}

Ival::Ival(const mpz_class& z) {
  init();
  mpfr_set_z(lo_, z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(hi_, z.get_mpz_t(), MPFR_RNDU);
}

Ival::Ival(const mpq_class& q) {
  init();
  mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

double Ival::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Ival::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Ival::mid() const { return 0.5 * (lo_d() + hi_d()); }

double Ival::width() const {
  mpfr_t w;
  mpfr_init2(w, kIvalPrec);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double r = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return r;
}

Ival Ival::operator+(const Ival& b) const {
  Ival r;
  mpfr_add(r.lo_, lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, b.hi_, MPFR_RNDU);
  return r;
}

Ival Ival::operator-(const Ival& b) const {
  Ival r;
  mpfr_sub(r.lo_, lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, b.lo_, MPFR_RNDU);
  return r;
}

Ival Ival::operator-() const {
  Ival r;
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Ival Ival::operator*(const Ival& b) const {
  // All four endpoint products, each with both roundings.
  Ival r;
  mpfr_t t;
  mpfr_init2(t, kIvalPrec);
  const mpfr_t* xs[2] = {&lo_, &hi_};
  const mpfr_t* ys[2] = {&b.lo_, &b.hi_};
  bool first = true;
  for (auto* x : xs) {
    for (auto* y : ys) {
      mpfr_mul(t, *x, *y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, *x, *y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Ival Ival::operator/(const Ival& b) const {
  if (b.contains_zero()) throw std::domain_error("Ival: division by interval containing 0");
  Ival r;
  mpfr_t t;
  mpfr_init2(t, kIvalPrec);
  const mpfr_t* xs[2] = {&lo_, &hi_};
  const mpfr_t* ys[2] = {&b.lo_, &b.hi_};
  bool first = true;
  for (auto* x : xs) {
    for (auto* y : ys) {
      mpfr_div(t, *x, *y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, *x, *y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Ival Ival::log() const {
  if (!is_positive()) throw std::domain_error("Ival::log on non-positive interval");
  Ival r;
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Ival Ival::exp() const {
  Ival r;
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Ival Ival::pow_ui(unsigned long e) const {
  Ival r(1L);
  Ival base = *this;
  // Binary powering with interval multiplies keeps the enclosure tight.
  while (e > 0) {
    if (e & 1UL) r = r * base;
    base = base * base;
    e >>= 1UL;
  }
  return r;
}

Ival Ival::pow_q(const mpq_class& q) const {
  if (q.get_den() == 1 && q.get_num() >= 0 && q.get_num().fits_ulong_p())
    return pow_ui(q.get_num().get_ui());
  return (log() * Ival(q)).exp();
}

Ival Ival::log_z(const mpz_class& z) {
  if (z < 1) throw std::domain_error("Ival::log_z needs z >= 1");
  Ival r;
  mpfr_t t;
  mpfr_init2(t, kIvalPrec);
  mpfr_set_z(t, z.get_mpz_t(), MPFR_RNDD);
  mpfr_log(r.lo_, t, MPFR_RNDD);
  mpfr_set_z(t, z.get_mpz_t(), MPFR_RNDU);
  mpfr_log(r.hi_, t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

Ival Ival::min(const Ival& a, const Ival& b) {
  Ival r;
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Ival Ival::max(const Ival& a, const Ival& b) {
  Ival r;
  mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Ival Ival::span(const Ival& a, const Ival& b) {
  Ival r;
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

bool Ival::contains_zero() const {
  return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool Ival::is_positive() const { return mpfr_sgn(lo_) > 0; }

bool Ival::certainly_le(const Ival& b) const { return mpfr_cmp(hi_, b.lo_) <= 0; }
bool Ival::certainly_lt(const Ival& b) const { return mpfr_cmp(hi_, b.lo_) < 0; }

std::string Ival::str(int digits) const {
  char buf[256];
  std::string out = "[";
  mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, lo_);
  out += buf;
  out += ", ";
  mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, hi_);
  out += buf;
  out += "]";
  return out;
}

}  // namespace afs
