#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "mockdissect/errors.hpp"

namespace mockdissect {

using BigInt = mpz_class;

/// Exact rational number, always in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  Rational(long num, long den) : Rational(BigInt(num), BigInt(den)) {}

  static Rational from_mpq(mpq_class v) {
    Rational r;
    r.v_ = std::move(v);
    r.v_.canonicalize();
    return r;
  }

  BigInt num() const { return v_.get_num(); }
  BigInt den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return from_mpq(-v_); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("division by zero rational");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  // acc += a * b without a named temporary at the call site.
  void add_product(const Rational& a, const Rational& b) {
    thread_local mpq_class t;
    mpq_mul(t.get_mpq_t(), a.v_.get_mpq_t(), b.v_.get_mpq_t());
    v_ += t;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  BigInt floor() const {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
  }
  BigInt ceil() const {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
  }
  // In [0, 1).
  Rational frac() const { return *this - Rational(floor()); }

  double to_double() const { return v_.get_d(); }

  // "p/q", or "p" when the denominator is 1.
  std::string to_string() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  static Rational parse(std::string_view text) {
    std::string s;
    for (char ch : text)
      if (ch != ' ' && ch != '\t') s.push_back(ch);
    if (s.empty()) throw ParseError("empty rational");
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(BigInt(s, 10));
      return Rational(BigInt(s.substr(0, slash), 10), BigInt(s.substr(slash + 1), 10));
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed rational '" + std::string(text) + "'");
    }
  }

 private:
  mpq_class v_;
};

inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline std::string to_string(const Rational& x) { return x.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.to_string(); }

inline Rational inverse(const Rational& x) {
  if (x.is_zero()) throw DomainError("zero has no inverse");
  return Rational(1) / x;
}

inline long to_long(const BigInt& v) {
  if (!v.fits_slong_p()) throw DomainError("integer out of machine range: " + v.get_str());
  return v.get_si();
}

inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long mod_floor(long a, long m) {
  long r = a % m;
  return r < 0 ? r + (m < 0 ? -m : m) : r;
}

inline long gcd_l(long a, long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline long lcm_l(long a, long b) {
  if (a == 0 || b == 0) return 0;
  return a / gcd_l(a, b) * (b < 0 ? -b : b);
}

}  // namespace mockdissect
