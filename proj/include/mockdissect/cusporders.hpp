#pragma once

// Invariant orders at cusps: exact orders of eta and generalized eta products, lower bounds
// for the holomorphic parts of R2~ and S~, and their composition over products and sums.
// Orders are width-free; infinity is the pair (alpha, gamma) = (1, 0).

#include <algorithm>
#include <vector>

#include "mockdissect/errors.hpp"
#include "mockdissect/mockforms.hpp"
#include "mockdissect/modgroup.hpp"
#include "mockdissect/qseries.hpp"
#include "mockdissect/rational.hpp"

namespace mockdissect {

struct OrderBound {
  Rational value;
  bool exact = true;
};

inline bool operator==(const OrderBound& x, const OrderBound& y) { return x.value == y.value && x.exact == y.exact; }

/// Order of a product.
inline OrderBound operator+(const OrderBound& x, const OrderBound& y) {
  return {x.value + y.value, x.exact && y.exact};
}

/// Order after dividing by a form of exactly known order.
inline OrderBound operator-(const OrderBound& x, const OrderBound& y) {
  if (!y.exact) throw DomainError("cannot divide by a form whose order is only bounded");
  return {x.value - y.value, x.exact};
}

/// Order of a sum: the least summand order, exact only for a single summand.
inline OrderBound min_of(const std::vector<OrderBound>& xs) {
  if (xs.empty()) throw DomainError("empty sum has no order");
  OrderBound out = xs.front();
  for (size_t i = 1; i < xs.size(); ++i) out.value = std::min(out.value, xs[i].value);
  out.exact = xs.size() == 1 && xs.front().exact;
  return out;
}

namespace detail {

inline std::pair<long, long> alpha_gamma(const Cusp& c) { return {c.num, c.den}; }

inline Rational nu_plain(const Rational& u, const Rational& w) {
  const Rational s = u + w;
  if (s <= Rational(1)) return s / Rational(2) - Rational(1, 8);
  return Rational(7, 8) - s / Rational(2);
}

}  // namespace detail

/// nu~(u, w): the least q-power of the holomorphic part of mu~(u tau + *, w tau + *; tau) for
/// generic phases. When the fractional parts differ by more than 1/2 the holomorphic part of
/// R(u - v) contributes a term of order -1/8 + |{u} - {w}|/2, which lies below nu({u}, {w}).
inline Rational nu_tilde(const Rational& u, const Rational& w) {
  const Rational fu = u.frac(), fw = w.frac();
  const Rational dfl = Rational(u.floor() - w.floor());
  const Rational df = fu - fw;
  const Rational adf = df < Rational(0) ? -df : df;
  Rational k = detail::nu_plain(fu, fw);
  if (adf >= Rational(1, 2)) k = std::min(k, Rational(-1, 8) + adf / Rational(2));
  return dfl * dfl / Rational(2) + dfl * df + k;
}

/// The same with k = nu({u}, {w}) whenever |{u} - {w}| != 1/2, which is not a lower bound when
/// |{u} - {w}| > 1/2. Kept for comparison only.
inline Rational nu_tilde_uncorrected(const Rational& u, const Rational& w) {
  const Rational fu = u.frac(), fw = w.frac();
  const Rational dfl = Rational(u.floor() - w.floor());
  const Rational df = fu - fw;
  Rational k = detail::nu_plain(fu, fw);
  if (df == Rational(1, 2) || df == Rational(-1, 2)) k = std::min(Rational(1, 8), k);
  return dfl * dfl / Rational(2) + dfl * df + k;
}

/// Lower bound for the order of R2~(a, c; tau) at a cusp.
inline OrderBound ord_bound_r2tilde(long a, long c, const Cusp& cusp) {
  if (c < 1) throw DomainError("c must be positive");
  if (mod_floor(2 * a, c) == 0) throw DomainError("R2 bound needs c not dividing 2a");
  auto [al, ga] = detail::alpha_gamma(cusp);
  const long g = gcd_l(4, ga);
  const Rational m(4 * al / g), r(ga / g), A(a), C(c);
  const Rational amr2c = A * m * r / (Rational(2) * C);
  const Rational u = Rational(2) * A * r / C;
  const Rational w = m / Rational(4);
  const Rational inner = -m * m / Rational(32) - Rational(2) * A * A * r * r / (C * C) +
                         std::min(-amr2c + nu_tilde(u, -w), amr2c + nu_tilde(u, w));
  return {Rational(g * g, 4) * inner, false};
}

/// Lower bound for the order of S~(k, c; tau) at a cusp, 0 <= k < c.
inline OrderBound ord_bound_stilde(long k, long c, const Cusp& cusp) {
  detail::check_s_params(k, c);
  auto [al, ga] = detail::alpha_gamma(cusp);
  const long cc = c * c;
  const long g = gcd_l(4 * cc, ga);
  const Rational m(4 * cc * al / g), r(ga / g), C(c);
  const Rational t(1 + 4 * k - 2 * c);
  const Rational inner = -m * m * t * t / (Rational(32) * C * C) +
                         m * r * t * Rational(c - 1) / (Rational(8) * C) -
                         r * r * Rational((c - 1) * (c - 1)) / Rational(8) +
                         nu_tilde(Rational(1 + 4 * k - c) * m / (Rational(4) * C),
                                  m / Rational(4) + Rational(c - 1) * r / Rational(2));
  return {Rational(g * g) / Rational(4 * cc) * inner, false};
}

/// Exact order of f_{N,rho} at a cusp.
inline OrderBound ord_geta(long N, long rho, const Cusp& cusp) {
  if (N < 1) throw DomainError("N must be positive");
  if (mod_floor(rho, N) == 0) throw DomainError("f_{N,rho} needs N not dividing rho");
  auto [al, ga] = detail::alpha_gamma(cusp);
  const long g = gcd_l(N, ga);
  const Rational x = Rational(mod_floor(al * rho, g), g) - Rational(1, 2);
  return {Rational(g * g, 2 * N) * x * x, true};
}

/// Exact order of eta(d tau) at a cusp.
inline OrderBound ord_eta(long d, const Cusp& cusp) {
  if (d < 1) throw DomainError("d must be positive");
  const long g = gcd_l(d, cusp.den);
  return {Rational(g * g, 24 * d), true};
}

/// Exact order of a product of eta and generalized eta factors.
inline OrderBound ord_eta_quotient(const std::vector<EtaFactor>& fs, const Cusp& cusp) {
  OrderBound out{Rational(0), true};
  for (const auto& f : fs) {
    OrderBound o = f.rho == 0 ? ord_eta(f.N, cusp) : ord_geta(f.N, f.rho, cusp);
    out.value += o.value * Rational(f.power);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity terms as weight-one forms

/// eta(4 tau) eta(tau) / eta(2 tau) = q^(1/8) (q, q^3, q^4; q^4)_inf.
inline std::vector<EtaFactor> weight_one_prefactor() { return {{4, 0, 1}, {1, 0, 1}, {2, 0, -1}}; }

/// A J-quotient term of residue d, after q -> q^c, times q^(d - 1/8) and the weight-one
/// prefactor, written as q^residual times an eta quotient of level 4c^2 (coefficient A dropped).
struct EtaQuotientTerm {
  std::vector<EtaFactor> factors;
  Rational residual;
};

inline EtaQuotientTerm j_term_eta_quotient(const Identity& id, const IdentityTerm& t, long d) {
  if (t.kind != IdentityTerm::Kind::J) throw DomainError("not a J-quotient term");
  const long c = id.c, N = 4 * c * c;
  // J_a(q^c) = q^(N/24 - x_a) f_{N,ca} / eta(N tau), x_a = (N - 2ca)^2 / 8N;  J_0(q^c) = q^(-N/24) eta(N tau)
  EtaQuotientTerm out{weight_one_prefactor(), Rational(d) + Rational(c) * t.qpow - Rational(1, 8)};
  long eta_power = 0;
  auto add = [&](const JFactor& f, long sign) {
    const long e = sign * f.e;
    if (f.a == 0) {
      eta_power += e;
      out.residual -= Rational(e * N, 24);
      return;
    }
    const long rho = c * f.a;
    out.factors.push_back({N, rho, e});
    eta_power -= e;
    out.residual += Rational(e) * (Rational(N, 24) - Rational((N - 2 * rho) * (N - 2 * rho), 8 * N));
  };
  for (const auto& f : t.num) add(f, 1);
  for (const auto& f : t.den) add(f, -1);
  if (eta_power != 0) out.factors.push_back({N, 0, eta_power});
  return out;
}

/// Order at a cusp of one term of the weight-one form P (q^(-1/8) R2_d-term(q^c) q^d),
/// P the weight-one prefactor. S terms are bounded through S~, J terms are exact.
inline OrderBound ord_bound_term(const Identity& id, const IdentityTerm& t, long d, const Cusp& cusp) {
  if (t.kind == IdentityTerm::Kind::S) {
    if (t.tau_scale != Rational(1, id.c) || Rational(d) + Rational(id.c) * t.qpow != Rational(0))
      throw DomainError("S term is not of the form S(k,c;tau) after q -> q^c");
    return ord_eta_quotient(weight_one_prefactor(), cusp) + ord_bound_stilde(t.k, id.c, cusp);
  }
  return ord_eta_quotient(j_term_eta_quotient(id, t, d).factors, cusp);
}

/// Order bound at a cusp of P R2~(a, c; tau).
inline OrderBound ord_bound_lhs(const Identity& id, const Cusp& cusp) {
  return ord_eta_quotient(weight_one_prefactor(), cusp) + ord_bound_r2tilde(id.a, id.c, cusp);
}

/// Order bound at a cusp of P (R2 - sum_d q^d R2_d(q^c)) q^(-1/8): the least summand.
inline OrderBound ord_bound_difference(const Identity& id, const Cusp& cusp) {
  std::vector<OrderBound> parts{ord_bound_lhs(id, cusp)};
  for (long d = 0; d < static_cast<long>(id.residues.size()); ++d)
    for (const auto& t : id.residues[d]) parts.push_back(ord_bound_term(id, t, d, cusp));
  return min_of(parts);
}

}  // namespace mockdissect
