#pragma once

// Truncated Laurent-Puiseux series in q.
//
// A QSeries<R> stores coefficients over ring R on the exponent lattice (1/D)Z, densely from
// min_exp up to (excluding) prec, both in 1/D units. Coefficients below min_exp are zero;
// coefficients at or beyond prec are unknown and reading them is an error.

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "mockdissect/cyclotomic.hpp"
#include "mockdissect/errors.hpp"
#include "mockdissect/rational.hpp"

namespace mockdissect {

inline std::complex<double> to_complex(const Rational& x) { return {x.to_double(), 0.0}; }
inline std::complex<double> to_complex(const CycNum& x) { return x.to_complex(); }

template <class R>
R parse_coeff(std::string_view text);
template <>
inline Rational parse_coeff<Rational>(std::string_view text) { return Rational::parse(text); }
template <>
inline CycNum parse_coeff<CycNum>(std::string_view text) { return CycNum::parse(text); }

template <class R>
class QSeries {
 public:
  using coeff_type = R;

  QSeries() : QSeries(R{}, 1, 0, 0) {}
  /// All-zero series known on [min_exp, prec) (1/denom units).
  QSeries(R zero, long denom, long min_exp, long prec)
      : zero_(std::move(zero)), denom_(denom), min_(min_exp), prec_(std::max(prec, min_exp)) {
    if (denom_ < 1) throw DomainError("series lattice denominator must be positive");
    c_.assign(static_cast<size_t>(prec_ - min_), zero_);
  }

  /// The constant c, known below the rational precision bound `prec`.
  static QSeries constant(const R& c, const Rational& prec, const R& zero) {
    long d = to_long(prec.den());
    QSeries s(zero, d, 0, to_long(prec.num()));
    if (s.prec_ > 0) s.c_[0] = c;
    return s;
  }

  const R& zero() const { return zero_; }
  long denom() const { return denom_; }
  long min_exp() const { return min_; }
  long prec() const { return prec_; }
  Rational min_exponent() const { return Rational(min_, denom_); }
  Rational precision() const { return Rational(prec_, denom_); }
  size_t size() const { return c_.size(); }

  // By lattice index n (exponent n/D), min_exp <= n < prec.
  const R& at(long n) const { return c_[static_cast<size_t>(n - min_)]; }
  R& at(long n) { return c_[static_cast<size_t>(n - min_)]; }
  std::vector<R>& data() { return c_; }
  const std::vector<R>& data() const { return c_; }

  /// Exact coefficient of q^e. Off-lattice exponents and exponents below min_exp read as zero.
  R coeff_at(const Rational& e) const {
    if (e >= precision())
      throw PrecisionError("coefficient of q^" + e.to_string() + " is unknown (precision " +
                           precision().to_string() + ")");
    Rational scaled = e * Rational(denom_);
    if (!scaled.is_integer()) return zero_;
    long n = to_long(scaled.num());
    if (n < min_) return zero_;
    return at(n);
  }

  /// Lattice index of the first nonzero coefficient, or prec when zero to precision.
  long valuation() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (!is_zero(c_[i])) return min_ + static_cast<long>(i);
    return prec_;
  }
  bool is_zero_to_precision() const { return valuation() == prec_; }

  /// Same series on the finer lattice (1/new_denom)Z; new_denom must be a multiple of denom.
  QSeries on_lattice(long new_denom) const {
    if (new_denom % denom_ != 0) throw DomainError("lattice refinement must be a multiple");
    const long f = new_denom / denom_;
    if (f == 1) return *this;
    QSeries r(zero_, new_denom, min_ * f, prec_ * f);
    for (size_t i = 0; i < c_.size(); ++i)
      if (!is_zero(c_[i])) r.at((min_ + static_cast<long>(i)) * f) = c_[i];
    return r;
  }

  /// Coarsest equivalent lattice: divides D by the gcd of everything that must stay on it.
  QSeries compacted() const {
    long g = gcd_l(denom_, gcd_l(min_, prec_));
    for (size_t i = 0; i < c_.size() && g > 1; ++i)
      if (!is_zero(c_[i])) g = gcd_l(g, min_ + static_cast<long>(i));
    if (g <= 1) return *this;
    QSeries r(zero_, denom_ / g, min_ / g, prec_ / g);
    for (size_t i = 0; i < c_.size(); ++i)
      if (!is_zero(c_[i])) r.at((min_ + static_cast<long>(i)) / g) = c_[i];
    return r;
  }

  /// Restrict to a smaller precision bound (lattice index), never extending.
  QSeries truncated(long new_prec) const {
    if (new_prec >= prec_) return *this;
    QSeries r(*this);
    long p = std::max(new_prec, min_);
    r.c_.resize(static_cast<size_t>(p - min_), zero_);
    r.prec_ = p;
    return r;
  }
  QSeries truncated(const Rational& bound) const {
    Rational idx = bound * Rational(denom_);
    return truncated(to_long(idx.ceil()));
  }

  QSeries operator-() const {
    QSeries r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }

  /// Semantic equality: same known range and the same coefficient at every exponent.
  friend bool operator==(const QSeries& a, const QSeries& b) {
    if (a.precision() != b.precision()) return false;
    long d = lcm_l(a.denom_, b.denom_);
    QSeries x = a.on_lattice(d), y = b.on_lattice(d);
    long lo = std::min(x.min_, y.min_);
    for (long n = lo; n < x.prec_; ++n) {
      bool zx = n < x.min_ || is_zero(x.at(n));
      bool zy = n < y.min_ || is_zero(y.at(n));
      if (zx != zy) return false;
      if (!zx && !(x.at(n) == y.at(n))) return false;
    }
    return true;
  }

 private:
  R zero_;
  long denom_;
  long min_;
  long prec_;
  std::vector<R> c_;
};

using RSeries = QSeries<Rational>;
using CSeries = QSeries<CycNum>;

namespace detail {
template <class A, class B>
std::pair<QSeries<A>, QSeries<B>> unify(const QSeries<A>& x, const QSeries<B>& y) {
  long d = lcm_l(x.denom(), y.denom());
  return {x.on_lattice(d), y.on_lattice(d)};
}

inline void add_product(Rational& acc, const Rational& a, const Rational& b) { acc.add_product(a, b); }
inline void add_product(CycNum& acc, const CycNum& a, const CycNum& b) { acc.add_product(a, b); }
inline void add_product(CycNum& acc, const CycNum& a, const Rational& b) { acc.add_product(a, b); }
inline void add_product(CycNum& acc, const Rational& a, const CycNum& b) { acc.add_product(b, a); }
}  // namespace detail

template <class R>
QSeries<R> qs_add(const QSeries<R>& x, const QSeries<R>& y) {
  auto [a, b] = detail::unify(x, y);
  QSeries<R> r(a.zero(), a.denom(), std::min(a.min_exp(), b.min_exp()), std::min(a.prec(), b.prec()));
  for (long n = a.min_exp(); n < r.prec(); ++n) r.at(n) += a.at(n);
  for (long n = b.min_exp(); n < r.prec(); ++n) r.at(n) += b.at(n);
  return r;
}

template <class R>
QSeries<R> qs_sub(const QSeries<R>& x, const QSeries<R>& y) {
  return qs_add(x, -y);
}

/// Truncated product; the result ring is that of the first factor unless only the second
/// is cyclotomic.
template <class A, class B>
auto qs_mul(const QSeries<A>& x, const QSeries<B>& y) {
  if constexpr (std::is_same_v<A, Rational> && std::is_same_v<B, CycNum>) {
    return qs_mul(y, x);
  } else {
    auto [a, b] = detail::unify(x, y);
    // each factor is known exactly below its precision, so the product is known below the least
    // of (precision of one) + (valuation of the other)
    const long va = a.valuation(), vb = b.valuation();
    const long hi = std::min(a.prec() + vb, b.prec() + va);
    const long lo = std::min(va + vb, hi);
    QSeries<A> r(a.zero(), a.denom(), lo, hi);
    std::vector<long> nzb;
    for (long j = vb - b.min_exp(); j < static_cast<long>(b.size()); ++j)
      if (!is_zero(b.data()[static_cast<size_t>(j)])) nzb.push_back(j);
    const long off = a.min_exp() + b.min_exp() - lo;
    for (long i = va - a.min_exp(); i < static_cast<long>(a.size()) && i + off < hi - lo; ++i) {
      const A& ai = a.data()[static_cast<size_t>(i)];
      if (is_zero(ai)) continue;
      for (long j : nzb) {
        const long k = i + j + off;
        if (k >= hi - lo) break;
        detail::add_product(r.data()[static_cast<size_t>(k)], ai, b.data()[static_cast<size_t>(j)]);
      }
    }
    return r;
  }
}

template <class R, class S>
QSeries<R> operator*(const QSeries<R>& x, const QSeries<S>& y) {
  return qs_mul(x, y);
}
template <class R>
QSeries<R> operator+(const QSeries<R>& x, const QSeries<R>& y) {
  return qs_add(x, y);
}
template <class R>
QSeries<R> operator-(const QSeries<R>& x, const QSeries<R>& y) {
  return qs_sub(x, y);
}

template <class R>
QSeries<R> qs_scale(const QSeries<R>& x, const R& c) {
  QSeries<R> r(x);
  for (auto& v : r.data())
    if (!is_zero(v)) v = v * c;
  return r;
}

inline CSeries qs_scale(const RSeries& x, const CycNum& c) {
  CSeries r(CycNum::zero(c.order()), x.denom(), x.min_exp(), x.prec());
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!x.at(n).is_zero()) r.at(n) = c * x.at(n);
  return r;
}

inline CSeries qs_scale(const CSeries& x, const Rational& c) {
  CSeries r(x);
  for (auto& v : r.data())
    if (!v.is_zero()) v *= c;
  return r;
}

/// Coefficient-wise image of a rational series in Q(zeta_order).
inline CSeries to_cyclotomic(const RSeries& x, int order) { return qs_scale(x, CycNum::one(order)); }

/// Coefficient-wise embedding into a larger cyclotomic field.
inline CSeries qs_embed(const CSeries& x, int order) {
  CSeries r(CycNum::zero(order), x.denom(), x.min_exp(), x.prec());
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!x.at(n).is_zero()) r.at(n) = x.at(n).embed(order);
  return r;
}

/// Multiplicative inverse up to precision.
template <class R>
QSeries<R> qs_inv(const QSeries<R>& x) {
  const long v = x.valuation();
  if (v == x.prec()) throw DomainError("cannot invert a series that is zero to its precision");
  const long n = x.prec() - v;  // relative precision
  const R lead_inv = inverse(x.at(v));
  QSeries<R> r(x.zero(), x.denom(), -v, -v + n);
  r.at(-v) = lead_inv;
  std::vector<long> nz;
  for (long j = 1; j < n; ++j)
    if (!is_zero(x.at(v + j))) nz.push_back(j);
  for (long k = 1; k < n; ++k) {
    R acc = x.zero();
    for (long j : nz) {
      if (j > k) break;
      const R& y = r.at(-v + k - j);
      if (!is_zero(y)) detail::add_product(acc, x.at(v + j), y);
    }
    if (!is_zero(acc)) r.at(-v + k) = -(acc * lead_inv);
  }
  return r;
}

/// x / y up to precision.
template <class A, class B>
auto qs_div(const QSeries<A>& x, const QSeries<B>& y) {
  return qs_mul(x, qs_inv(y));
}

/// Multiply by q^e.
template <class R>
QSeries<R> qs_shift(const QSeries<R>& x, const Rational& e) {
  long d = lcm_l(x.denom(), to_long(e.den()));
  QSeries<R> y = x.on_lattice(d);
  long s = to_long((e * Rational(d)).num());
  QSeries<R> r(y.zero(), d, y.min_exp() + s, y.prec() + s);
  for (long n = y.min_exp(); n < y.prec(); ++n) r.at(n + s) = y.at(n);
  return r;
}

/// q -> q^s for a positive rational s (tau -> s tau).
template <class R>
QSeries<R> qs_substitute(const QSeries<R>& x, const Rational& s) {
  if (s.sign() <= 0) throw DomainError("substitution exponent must be positive");
  const long a = to_long(s.num()), b = to_long(s.den());
  QSeries<R> r(x.zero(), x.denom() * b, x.min_exp() * a, x.prec() * a);
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!is_zero(x.at(n))) r.at(n * a) = x.at(n);
  return r.compacted();
}

/// Terms with integral exponent congruent to r mod c; exponents are kept.
template <class R>
QSeries<R> dissect(const QSeries<R>& x, long c, long r) {
  if (c < 1) throw DomainError("dissection modulus must be positive");
  const long d = x.denom();
  QSeries<R> out(x.zero(), d, x.min_exp(), x.prec());
  for (long n = x.min_exp(); n < x.prec(); ++n) {
    if (is_zero(x.at(n))) continue;
    if (n % d != 0) throw DomainError("dissection needs integral exponents; found q^" + Rational(n, d).to_string());
    if (mod_floor(n / d - r, c) == 0) out.at(n) = x.at(n);
  }
  return out;
}

template <class R>
R coeff_at(const QSeries<R>& x, const Rational& e) {
  return x.coeff_at(e);
}

/// Floating-point evaluation at tau (Im tau > 0). This is the only inexact operation on series.
template <class R>
std::complex<double> eval_at(const QSeries<R>& x, std::complex<double> tau) {
  if (!(tau.imag() > 0)) throw DomainError("eval_at needs Im(tau) > 0");
  const std::complex<double> two_pi_i(0.0, 2.0 * std::numbers::pi);
  std::complex<double> s = 0;
  for (long n = x.min_exp(); n < x.prec(); ++n) {
    if (is_zero(x.at(n))) continue;
    s += to_complex(x.at(n)) * std::exp(two_pi_i * tau * (static_cast<double>(n) / x.denom()));
  }
  return s;
}

/// |q|^prec / (1 - |q|): the truncation error for coefficients of modulus at most 1.
template <class R>
double eval_tail_bound(const QSeries<R>& x, std::complex<double> tau) {
  double aq = std::exp(-2.0 * std::numbers::pi * tau.imag());
  return std::pow(aq, x.precision().to_double()) / (1.0 - aq);
}

// ---------------------------------------------------------------------------
// Serialization: "D=<d> min=<m> prec=<p>" then "<exponent numerator>: <coefficient>" for
// every nonzero coefficient.

template <class R>
std::string serialize(const QSeries<R>& x) {
  std::ostringstream os;
  os << "D=" << x.denom() << " min=" << x.min_exp() << " prec=" << x.prec() << "\n";
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!is_zero(x.at(n))) os << n << ": " << to_string(x.at(n)) << "\n";
  return os.str();
}

template <class R>
QSeries<R> deserialize(const std::string& text, const R& zero) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  long d = 0, m = 0, p = 0;
  bool header = false;
  QSeries<R> out;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header) {
      if (std::sscanf(line.c_str(), "D=%ld min=%ld prec=%ld", &d, &m, &p) != 3 || d < 1 || p < m)
        throw ParseError("bad series header '" + line + "'", lineno);
      out = QSeries<R>(zero, d, m, p);
      header = true;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected '<exponent>: <coefficient>'", lineno);
    long n = 0;
    try {
      n = std::stol(line.substr(0, colon));
    } catch (const std::exception&) {
      throw ParseError("bad exponent", lineno);
    }
    if (n < m || n >= p) throw ParseError("exponent outside the known range", lineno);
    try {
      out.at(n) = parse_coeff<R>(std::string_view(line).substr(colon + 1));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!header) throw ParseError("missing series header");
  return out;
}

// ---------------------------------------------------------------------------
// Product building blocks over Q.

namespace detail {
// Lattice index bound for exponents < prec on (1/d)Z.
inline long prec_index(const Rational& prec, long d) { return to_long((prec * Rational(d)).ceil()); }
}  // namespace detail

/// x <- x * (1 - s q^(e/D)), e > 0 in lattice units.
template <class R, class S>
void mul_one_minus(QSeries<R>& x, const S& s, long e) {
  for (long n = x.prec() - 1; n - e >= x.min_exp(); --n) {
    const R& src = x.at(n - e);
    if (is_zero(src)) continue;
    R t = src * s;
    x.at(n) -= t;
  }
}

/// x <- x / (1 - s q^(e/D)), e > 0 in lattice units.
template <class R, class S>
void div_one_minus(QSeries<R>& x, const S& s, long e) {
  for (long n = x.min_exp() + e; n < x.prec(); ++n) {
    const R& src = x.at(n - e);
    if (is_zero(src)) continue;
    R t = src * s;
    x.at(n) += t;
  }
}

/// (sign q^a; q^m)_inf = prod_{j>=0} (1 - sign q^(a + j m)), truncated below prec.
inline RSeries pochhammer_inf(const Rational& a, const Rational& m, int sign, const Rational& prec) {
  if (m.sign() <= 0) throw DomainError("Pochhammer modulus must be positive");
  if (a.sign() < 0) throw DomainError("Pochhammer base exponent must be nonnegative");
  if (a.is_zero() && sign == 1) throw DomainError("(1; q^m)_inf vanishes identically");
  if (sign != 1 && sign != -1) throw DomainError("Pochhammer sign must be +1 or -1");
  const long d = lcm_l(to_long(a.den()), to_long(m.den()));
  const long p = std::max(detail::prec_index(prec, d), 0L);
  RSeries r(Rational(0), d, 0, p);
  if (p == 0) return r;
  r.at(0) = Rational(1);
  const long ai = to_long((a * Rational(d)).num()), mi = to_long((m * Rational(d)).num());
  for (long e = ai; e < p; e += mi) {
    if (e == 0) {
      r.at(0) = Rational(2);  // sign = -1: the factor (1 + 1)
      continue;
    }
    mul_one_minus(r, Rational(sign), e);
  }
  return r;
}

/// eta(d tau) = q^(d/24) (q^d; q^d)_inf.
inline RSeries eta_series(const Rational& d, const Rational& prec) {
  if (d.sign() <= 0) throw DomainError("eta scaling must be positive");
  Rational lead = d / Rational(24);
  return qs_shift(pochhammer_inf(d, d, 1, prec - lead), lead);
}

/// Generalized eta function f_{N,rho} = q^((N-2rho)^2/8N) (q^rho, q^(N-rho), q^N; q^N)_inf.
inline RSeries geta_f(long N, long rho, const Rational& prec) {
  if (N < 1) throw DomainError("generalized eta level must be positive");
  long r = mod_floor(rho, N);
  if (r == 0) throw DomainError("f_{N,rho} needs rho not divisible by N");
  Rational lead(( N - 2 * r) * (N - 2 * r), 8 * N);
  Rational inner = prec - lead;
  RSeries s = pochhammer_inf(Rational(r), Rational(N), 1, inner);
  s = s * pochhammer_inf(Rational(N - r), Rational(N), 1, inner);
  s = s * pochhammer_inf(Rational(N), Rational(N), 1, inner);
  return qs_shift(s, lead);
}

/// theta_4(0, q) = sum (-1)^n q^(n^2); cross-checked against (q^2;q^2)(q;q^2)^2.
inline RSeries theta4(long prec) {
  RSeries sum(Rational(0), 1, 0, std::max(prec, 0L));
  for (long n = 0; n * n < prec; ++n) sum.at(n * n) += Rational(n == 0 ? 1 : 2 * ((n % 2) ? -1 : 1));
  RSeries odd = pochhammer_inf(Rational(1), Rational(2), 1, Rational(prec));
  RSeries prod = pochhammer_inf(Rational(2), Rational(2), 1, Rational(prec)) * odd * odd;
  if (!(prod == sum)) throw std::logic_error("theta_4 sum and product forms disagree");
  return sum;
}

/// q -> -q on an integral lattice.
template <class R>
QSeries<R> qs_negate_variable(const QSeries<R>& x) {
  if (x.denom() != 1) throw DomainError("q -> -q needs integral exponents");
  QSeries<R> r(x);
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (n % 2 != 0 && !is_zero(r.at(n))) r.at(n) = -r.at(n);
  return r;
}

/// One factor of an eta quotient: eta(N tau)^power when rho == 0, else f_{N,rho}^power.
struct EtaFactor {
  long N;
  long rho;
  long power;
};

/// Leading exponent of a product of EtaFactors.
inline Rational eta_quotient_order(const std::vector<EtaFactor>& fs) {
  Rational e(0);
  for (const auto& f : fs) {
    if (f.N < 1) throw DomainError("eta level must be positive");
    if (f.rho == 0) {
      e += Rational(f.power * f.N, 24);
    } else {
      long r = mod_floor(f.rho, f.N);
      if (r == 0) throw DomainError("f_{N,rho} needs rho not divisible by N");
      e += Rational(f.power * (f.N - 2 * r) * (f.N - 2 * r), 8 * f.N);
    }
  }
  return e;
}

/// prod eta(N tau)^p * prod f_{N,rho}^p, expanded by in-place binomial updates.
inline RSeries eta_quotient(const std::vector<EtaFactor>& fs, const Rational& prec) {
  const Rational lead = eta_quotient_order(fs);
  const long p = std::max(detail::prec_index(prec - lead, 1), 0L);
  RSeries s(Rational(0), 1, 0, p);
  if (p > 0) s.at(0) = Rational(1);
  const Rational one(1);
  auto apply = [&](long e, long power) {
    for (long t = 0; t < std::abs(power); ++t) {
      if (power > 0)
        mul_one_minus(s, one, e);
      else
        div_one_minus(s, one, e);
    }
  };
  for (const auto& f : fs) {
    for (long e = f.N; e < p; e += f.N) apply(e, f.power);
    if (f.rho == 0) continue;
    const long r = mod_floor(f.rho, f.N);
    for (long e = r; e < p; e += f.N) apply(e, f.power);
    for (long e = f.N - r; e < p; e += f.N) apply(e, f.power);
  }
  return qs_shift(s, lead);
}

}  // namespace mockdissect
