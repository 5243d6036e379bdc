#include "banditlab/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "banditlab/types.hpp"

namespace banditlab {

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.q_ == 0) throw DomainError("rational division by zero");
  q_ /= o.q_;
  return *this;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value for rational");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  return Rational(q);
}

Rational Rational::dyadic(const mpz_class& num, unsigned long exp) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, exp);
  mpq_class q(num, den);
  q.canonicalize();
  return Rational(q);
}

bool Rational::is_dyadic(unsigned long* exp) const {
  const mpz_class& d = q_.get_den();
  // A canonical denominator is a power of two iff it has exactly one set bit.
  if (mpz_popcount(d.get_mpz_t()) != 1) return false;
  if (exp != nullptr) *exp = mpz_sizeinbase(d.get_mpz_t(), 2) - 1;
  return true;
}

std::string Rational::to_string() const {
  if (is_integer()) return q_.get_num().get_str();
  unsigned long exp = 0;
  if (is_dyadic(&exp)) {
    return q_.get_num().get_str() + "/2^" + std::to_string(exp);
  }
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

namespace {

// Exact decimal-string parse: "12", "-0.125", "3.", ".5".
Rational parse_decimal(const std::string& text) {
  std::string digits;
  long frac_digits = -1;
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  bool any = false;
  for (; i < text.size(); ++i) {
    if (text[i] == '.') {
      if (frac_digits >= 0) throw DomainError("bad rational literal: " + text);
      frac_digits = 0;
    } else if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits.push_back(text[i]);
      if (frac_digits >= 0) ++frac_digits;
      any = true;
    } else {
      throw DomainError("bad rational literal: " + text);
    }
  }
  if (!any) throw DomainError("bad rational literal: " + text);
  mpz_class num(digits.empty() ? "0" : digits, 10);
  if (neg) num = -num;
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10,
                frac_digits > 0 ? static_cast<unsigned long>(frac_digits) : 0);
  mpq_class q(num, den);
  q.canonicalize();
  return Rational(q);
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  const std::string num_part = text.substr(0, slash);
  std::string den_part = text.substr(slash + 1);
  if (num_part.empty() || den_part.empty()) {
    throw DomainError("bad rational literal: " + text);
  }
  mpz_class num, den;
  try {
    num = mpz_class(num_part, 10);
  } catch (const std::invalid_argument&) {
    throw DomainError("bad rational literal: " + text);
  }
  if (den_part.rfind("2^", 0) == 0) {
    const std::string exp_part = den_part.substr(2);
    if (exp_part.empty() ||
        exp_part.find_first_not_of("0123456789") != std::string::npos) {
      throw DomainError("bad rational literal: " + text);
    }
    return dyadic(num, std::stoul(exp_part));
  }
  try {
    den = mpz_class(den_part, 10);
  } catch (const std::invalid_argument&) {
    throw DomainError("bad rational literal: " + text);
  }
  if (den == 0) throw DomainError("rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Rational(q);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_string();
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace banditlab
