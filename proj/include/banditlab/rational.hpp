#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

namespace banditlab {

// Exact rational number backed by GMP. All noise-free reward logic runs on
// this type so that version-space membership, policy-tree branching and the
// SAT codec (whose numerators run to hundreds of bits) are bit-exact.
//
// Canonical text form:
//   integers            ->  "3"
//   dyadic p/2^q        ->  "3/2^5"
//   general rationals   ->  "1/6"
// parse() accepts all three plus exact decimal strings ("0.125" == 1/8).
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long n) : q_(n) {}  // NOLINT: implicit from integers is intended
  Rational(long num, long den);
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Exact value of the double (every finite double is a dyadic rational).
  static Rational from_double(double x);
  // num / 2^exp.
  static Rational dyadic(const mpz_class& num, unsigned long exp);
  static Rational parse(const std::string& text);

  double to_double() const { return q_.get_d(); }
  std::string to_string() const;

  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }
  bool is_integer() const { return q_.get_den() == 1; }
  // True iff the (canonical) denominator is a power of two; fills *exp.
  bool is_dyadic(unsigned long* exp = nullptr) const;

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t()) < 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  friend Rational abs(const Rational& a) {
    return Rational(mpq_class(::abs(a.q_)));
  }

  const mpq_class& raw() const { return q_; }

 private:
  mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Formats a double with enough digits to round-trip (17 significant digits),
// used everywhere floats hit an output file so runs are byte-reproducible.
std::string format_double(double x);

}  // namespace banditlab
