#pragma once

// Exact arithmetic in the cyclotomic fields Q(zeta_n).
//
// Elements are dense coordinate vectors over the power basis 1, z, ..., z^(phi(n)-1),
// reduced modulo the n-th cyclotomic polynomial, so equality is coordinate-wise.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mockdissect/errors.hpp"
#include "mockdissect/rational.hpp"

namespace mockdissect {

/// Per-order reduction data, shared by every CycNum of that order.
class CyclotomicContext {
 public:
  static std::shared_ptr<const CyclotomicContext> get(int order) {
    if (order < 1) throw DomainError("cyclotomic order must be positive");
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const CyclotomicContext>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    auto ctx = std::shared_ptr<const CyclotomicContext>(new CyclotomicContext(order));
    cache.emplace(order, ctx);
    return ctx;
  }

  int order() const { return order_; }
  int phi() const { return phi_; }
  // Monic Phi_n, low degree first; size phi + 1.
  const std::vector<long>& poly() const { return poly_; }
  // Coordinates of z^e for 0 <= e < n.
  const std::vector<long>& power(int e) const { return powers_[static_cast<size_t>(e)]; }

 private:
  explicit CyclotomicContext(int n) : order_(n) {
    poly_ = cyclotomic_poly(n);
    phi_ = static_cast<int>(poly_.size()) - 1;
    std::vector<long> cur(static_cast<size_t>(phi_), 0);
    cur[0] = 1;
    for (int e = 0; e < n; ++e) {
      powers_.push_back(cur);
      // multiply by z and reduce z^phi = -sum poly[i] z^i
      long top = cur[static_cast<size_t>(phi_ - 1)];
      for (int i = phi_ - 1; i > 0; --i) cur[static_cast<size_t>(i)] = cur[static_cast<size_t>(i - 1)];
      cur[0] = 0;
      if (top != 0)
        for (int i = 0; i < phi_; ++i) cur[static_cast<size_t>(i)] -= top * poly_[static_cast<size_t>(i)];
    }
  }

  // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, by exact integer division.
  static std::vector<long> cyclotomic_poly(int n) {
    std::vector<long> num(static_cast<size_t>(n) + 1, 0);
    num[0] = -1;
    num[static_cast<size_t>(n)] = 1;
    for (int d = 1; d < n; ++d) {
      if (n % d != 0) continue;
      auto den = cyclotomic_poly(d);
      num = divide(num, den);
    }
    return num;
  }

  static std::vector<long> divide(const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> rem = a;
    const long da = static_cast<long>(a.size()) - 1;
    const long db = static_cast<long>(b.size()) - 1;
    std::vector<long> q(static_cast<size_t>(da - db + 1), 0);
    for (long i = da; i >= db; --i) {
      long c = rem[static_cast<size_t>(i)];  // b is monic
      q[static_cast<size_t>(i - db)] = c;
      if (c == 0) continue;
      for (long j = 0; j <= db; ++j) rem[static_cast<size_t>(i - db + j)] -= c * b[static_cast<size_t>(j)];
    }
    return q;
  }

  int order_;
  int phi_ = 0;
  std::vector<long> poly_;
  std::vector<std::vector<long>> powers_;
};

/// Element of Q(zeta_n).
class CycNum {
 public:
  CycNum() : CycNum(1) {}
  explicit CycNum(int order) : ctx_(CyclotomicContext::get(order)), c_(static_cast<size_t>(ctx_->phi())) {}
  CycNum(int order, const Rational& constant) : CycNum(order) { c_[0] = constant; }
  CycNum(int order, std::vector<Rational> coeffs) : CycNum(order) {
    if (coeffs.size() != c_.size())
      throw DomainError("CycNum of order " + std::to_string(order) + " needs " + std::to_string(c_.size()) +
                        " coefficients, got " + std::to_string(coeffs.size()));
    c_ = std::move(coeffs);
  }

  static CycNum zero(int order) { return CycNum(order); }
  static CycNum one(int order) { return CycNum(order, Rational(1)); }
  /// zeta_n^e for any integer e.
  static CycNum zeta_pow(int order, long e) {
    CycNum r(order);
    const auto& p = r.ctx_->power(static_cast<int>(mod_floor(e, order)));
    for (size_t i = 0; i < p.size(); ++i) r.c_[i] = Rational(p[i]);
    return r;
  }

  int order() const { return ctx_->order(); }
  int dim() const { return ctx_->phi(); }
  std::span<const Rational> coeffs() const { return c_; }
  const Rational& operator[](size_t i) const { return c_[i]; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return false;
    return true;
  }

  CycNum operator-() const {
    CycNum r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }
  CycNum& operator+=(const CycNum& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CycNum& operator-=(const CycNum& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  CycNum& operator*=(const Rational& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  CycNum& operator*=(const CycNum& o) {
    *this = *this * o;
    return *this;
  }
  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(CycNum a, const Rational& s) { return a *= s; }
  friend CycNum operator*(const Rational& s, CycNum a) { return a *= s; }

  friend CycNum operator*(const CycNum& a, const CycNum& b) {
    a.check_same(b);
    const int phi = a.dim();
    std::vector<Rational> prod(static_cast<size_t>(2 * phi - 1));
    for (int i = 0; i < phi; ++i) {
      if (a.c_[static_cast<size_t>(i)].is_zero()) continue;
      for (int j = 0; j < phi; ++j) {
        if (b.c_[static_cast<size_t>(j)].is_zero()) continue;
        prod[static_cast<size_t>(i + j)].add_product(a.c_[static_cast<size_t>(i)], b.c_[static_cast<size_t>(j)]);
      }
    }
    const auto& poly = a.ctx_->poly();
    for (int e = 2 * phi - 2; e >= phi; --e) {
      Rational top = prod[static_cast<size_t>(e)];
      if (top.is_zero()) continue;
      for (int i = 0; i < phi; ++i)
        if (poly[static_cast<size_t>(i)] != 0)
          prod[static_cast<size_t>(e - phi + i)] -= top * Rational(poly[static_cast<size_t>(i)]);
    }
    prod.resize(static_cast<size_t>(phi));
    CycNum r(a.ctx_);
    r.c_ = std::move(prod);
    return r;
  }

  // acc += a * b
  void add_product(const CycNum& a, const CycNum& b) { *this += a * b; }
  void add_product(const CycNum& a, const Rational& s) {
    check_same(a);
    if (s.is_zero()) return;
    for (size_t i = 0; i < c_.size(); ++i)
      if (!a.c_[i].is_zero()) c_[i].add_product(a.c_[i], s);
  }

  friend bool operator==(const CycNum& a, const CycNum& b) { return a.order() == b.order() && a.c_ == b.c_; }

  /// Image under zeta_n -> zeta_n^k for k coprime to n.
  CycNum galois(long k) const {
    if (gcd_l(k, order()) != 1) throw DomainError("Galois exponent must be coprime to the order");
    CycNum r(ctx_);
    for (size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) r.add_product(zeta_pow(order(), k * static_cast<long>(i)), c_[i]);
    return r;
  }
  /// Complex conjugation, zeta -> zeta^{-1}.
  CycNum conj() const { return galois(-1); }

  /// Image in Q(zeta_m) under zeta_n -> zeta_m^(m/n).
  CycNum embed(int new_order) const {
    if (new_order <= 0 || new_order % order() != 0)
      throw DomainError("cannot embed order " + std::to_string(order()) + " into order " +
                        std::to_string(new_order));
    const long step = new_order / order();
    CycNum r(new_order);
    for (size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) r.add_product(zeta_pow(new_order, step * static_cast<long>(i)), c_[i]);
    return r;
  }

  /// Multiplicative inverse by solving the multiplication-by-x linear system over Q.
  CycNum inverse() const {
    if (is_zero()) throw DomainError("zero has no inverse in a cyclotomic field");
    const int phi = dim();
    // column j of M is x * z^j
    std::vector<std::vector<Rational>> m(static_cast<size_t>(phi), std::vector<Rational>(static_cast<size_t>(phi) + 1));
    for (int j = 0; j < phi; ++j) {
      CycNum col = *this * zeta_pow(order(), j);
      for (int i = 0; i < phi; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = col.c_[static_cast<size_t>(i)];
    }
    m[0][static_cast<size_t>(phi)] = Rational(1);
    for (int col = 0; col < phi; ++col) {
      int piv = col;
      while (piv < phi && m[static_cast<size_t>(piv)][static_cast<size_t>(col)].is_zero()) ++piv;
      if (piv == phi) throw DomainError("singular multiplication matrix");
      std::swap(m[static_cast<size_t>(piv)], m[static_cast<size_t>(col)]);
      Rational inv = Rational(1) / m[static_cast<size_t>(col)][static_cast<size_t>(col)];
      for (auto& v : m[static_cast<size_t>(col)]) v *= inv;
      for (int r = 0; r < phi; ++r) {
        if (r == col || m[static_cast<size_t>(r)][static_cast<size_t>(col)].is_zero()) continue;
        Rational f = m[static_cast<size_t>(r)][static_cast<size_t>(col)];
        for (int k = col; k <= phi; ++k)
          m[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * m[static_cast<size_t>(col)][static_cast<size_t>(k)];
      }
    }
    CycNum r(ctx_);
    for (int i = 0; i < phi; ++i) r.c_[static_cast<size_t>(i)] = m[static_cast<size_t>(i)][static_cast<size_t>(phi)];
    return r;
  }

  std::complex<double> to_complex() const {
    std::complex<double> s = 0;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / order();
      s += c_[i].to_double() * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return s;
  }

  /// "[c0, c1, ..., c_{phi-1}] @ zeta_n"
  std::string to_string() const {
    std::string s = "[";
    for (size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ", ";
      s += c_[i].to_string();
    }
    return s + "] @ zeta_" + std::to_string(order());
  }

  static CycNum parse(std::string_view text) {
    auto open = text.find('[');
    auto close = text.find(']');
    auto at = text.find("@ zeta_");
    if (open == std::string_view::npos || close == std::string_view::npos || at == std::string_view::npos || close < open)
      throw ParseError("malformed cyclotomic number '" + std::string(text) + "'");
    int order = 0;
    try {
      order = std::stoi(std::string(text.substr(at + 7)));
    } catch (const std::exception&) {
      throw ParseError("malformed cyclotomic order in '" + std::string(text) + "'");
    }
    std::vector<Rational> cs;
    auto body = text.substr(open + 1, close - open - 1);
    size_t pos = 0;
    while (pos <= body.size()) {
      auto comma = body.find(',', pos);
      auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      cs.push_back(Rational::parse(item));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    try {
      return CycNum(order, std::move(cs));
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  }

 private:
  explicit CycNum(std::shared_ptr<const CyclotomicContext> ctx)
      : ctx_(std::move(ctx)), c_(static_cast<size_t>(ctx_->phi())) {}

  void check_same(const CycNum& o) const {
    if (o.ctx_ != ctx_ && o.order() != order())
      throw DomainError("cyclotomic order mismatch: " + std::to_string(order()) + " vs " + std::to_string(o.order()) +
                        " (embed explicitly)");
  }

  std::shared_ptr<const CyclotomicContext> ctx_;
  std::vector<Rational> c_;
};

inline bool is_zero(const CycNum& x) { return x.is_zero(); }
inline CycNum inverse(const CycNum& x) { return x.inverse(); }
inline std::string to_string(const CycNum& x) { return x.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const CycNum& x) { return os << x.to_string(); }

/// m z + n z^2 + r z^3 + r z^4 + n z^5 + m z^6 with z = zeta_7.
inline CycNum A_of(long m, long n, long r) {
  const long w[7] = {0, m, n, r, r, n, m};
  CycNum x(7);
  for (int e = 1; e < 7; ++e)
    if (w[e] != 0) x.add_product(CycNum::zeta_pow(7, e), Rational(w[e]));
  return x;
}

/// Coefficient of zeta_p^r + zeta_p^(p-r) when x (order p, an odd prime) is written over
/// the basis zeta_p, ..., zeta_p^(p-1). Throws if x is not fixed by conjugation.
inline Rational project_rank_component(const CycNum& x, int r) {
  const int p = x.order();
  if (p < 3 || x.dim() != p - 1) throw DomainError("rank projection needs an odd prime order");
  if (r < 1 || r > (p - 1) / 2) throw DomainError("rank component out of range");
  // 1 = -(z + ... + z^(p-1)), so the z^j coordinate is b_j - b_0 (b_{p-1} = 0)
  auto coord = [&](int j) { return (j == p - 1 ? Rational(0) : x[static_cast<size_t>(j)]) - x[0]; };
  for (int j = 1; j <= (p - 1) / 2; ++j)
    if (coord(j) != coord(p - j))
      throw DomainError("element " + x.to_string() + " is not conjugation-symmetric");
  return coord(r);
}

}  // namespace mockdissect
