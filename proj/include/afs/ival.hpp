// Outward-rounded interval arithmetic over MPFR.
//
// Every operation rounds the lower endpoint down and the upper endpoint up,
// so an enclosure computed here is sound: if a comparison certainly_le(a, b)
// returns true, the underlying real inequality holds.

#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace afs {

// Working precision in bits. 256 bits ~ 77 decimal digits, comfortably above
// the 50-digit floor the certificate requires.
inline constexpr mpfr_prec_t kIvalPrec = 256;

class Ival {
 public:
  Ival();
  Ival(const Ival& o);
  Ival(Ival&& o) noexcept;
  Ival& operator=(const Ival& o);
  Ival& operator=(Ival&& o) noexcept;
  ~Ival();

  explicit Ival(long v);
  explicit Ival(double v);
  explicit Ival(const mpz_class& z);
  explicit Ival(const mpq_class& q);

  static Ival exact(long v) { return Ival(v); }

  const mpfr_t& lo() const { return lo_; }
  const mpfr_t& hi() const { return hi_; }
  double lo_d() const;
  double hi_d() const;
  double mid() const;
  double width() const;

  Ival operator+(const Ival& b) const;
  Ival operator-(const Ival& b) const;
  Ival operator*(const Ival& b) const;
  Ival operator/(const Ival& b) const;  // requires 0 not in b
  Ival operator-() const;

  Ival& operator+=(const Ival& b) { *this = *this + b; return *this; }
  Ival& operator*=(const Ival& b) { *this = *this * b; return *this; }

  // requires lo > 0
  Ival log() const;
  Ival exp() const;
  Ival pow_ui(unsigned long e) const;
  // x^q = exp(q log x), requires lo > 0
  Ival pow_q(const mpq_class& q) const;

  static Ival log_z(const mpz_class& z);   // ln of a big integer, z >= 1
  static Ival min(const Ival& a, const Ival& b);
  static Ival max(const Ival& a, const Ival& b);
  // Interval hull: [min(a.lo, b.lo), max(a.hi, b.hi)].
  static Ival span(const Ival& a, const Ival& b);

  bool contains_zero() const;
  bool is_positive() const;  // lo > 0

  // Certain (sound) comparisons: true only when the real inequality is
  // guaranteed by the enclosure.
  bool certainly_le(const Ival& b) const;
  bool certainly_lt(const Ival& b) const;
  bool certainly_ge(const Ival& b) const { return b.certainly_le(*this); }
  bool certainly_gt(const Ival& b) const { return b.certainly_lt(*this); }

  std::string str(int digits = 20) const;

 private:
  mpfr_t lo_, hi_;
  void init();
};

}  // namespace afs
