#pragma once

// The M2-rank generating function R2 and its companion Lambert series S(k,c;tau) as exact
// truncated q-series, several independent routes to each, and the data model for
// dissection identities R2(zeta_c^a; q) = sum_d q^d R2_d(q^c).

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mockdissect/cyclotomic.hpp"
#include "mockdissect/errors.hpp"
#include "mockdissect/parallel.hpp"
#include "mockdissect/qseries.hpp"

namespace mockdissect {

namespace detail {

inline long prec_ceil(const Rational& p) { return to_long(p.ceil()); }

// acc += coef * q^t / (1 - q^e) on the integer lattice, e != 0. A negative e is first
// rewritten as -q^(-e) / (1 - q^(-e)) so the expansion runs toward +infinity.
template <class R, class S>
void add_lambert_term(QSeries<R>& acc, const S& coef, long t, long e) {
  if (e == 0) throw DomainError("Lambert denominator 1 - q^0 vanishes");
  bool neg = e < 0;
  if (neg) {
    t -= e;
    e = -e;
  }
  for (long x = t; x < acc.prec(); x += e) {
    if (x < acc.min_exp()) throw std::logic_error("Lambert term below the accumulator range");
    if (neg)
      acc.at(x) -= coef;
    else
      acc.at(x) += coef;
  }
}

inline void check_s_params(long k, long c) {
  if (c < 1) throw DomainError("c must be positive");
  if (k < 0 || k >= c) throw DomainError("S(k,c) needs 0 <= k < c");
  if (mod_floor(1 + 4 * k - c, 4 * c) == 0)
    throw DomainError("S(" + std::to_string(k) + "," + std::to_string(c) + ") has a pole: 1+4k-c = 0 mod 4c");
}

// Exponent of q in the summand n of the S bilateral sum, c^2 n (2n + 3). Increasing in n for
// n >= 0 and decreasing in n for n <= -1 (derivative 4n + 3), so each half of the sum is cut
// at the first n whose numerator exponent reaches the precision; normalization of negative
// denominators only raises the exponent.
inline long s_numerator_exp(long c, long n) { return c * c * n * (2 * n + 3); }

inline CycNum zeta_of(long a, long c) { return CycNum::zeta_pow(static_cast<int>(c), a); }

}  // namespace detail

/// Exponent of the prefactor of S(k,c;tau).
inline long s_prefactor_exp(long k, long c) { return -c * c + 4 * k * c - 2 * k * k + c - k; }

// ---------------------------------------------------------------------------
// R2(zeta_c^a; q)

/// Eulerian form sum q^(n^2) (-q;q^2)_n / (zeta q^2, zeta^-1 q^2; q^2)_n, below q^prec.
inline CSeries r2_eulerian(long a, long c, long prec) {
  if (c < 1) throw DomainError("c must be positive");
  const CycNum z = detail::zeta_of(a, c), zi = detail::zeta_of(-a, c);
  const CycNum zero = CycNum::zero(static_cast<int>(c));
  CSeries acc(zero, 1, 0, std::max(prec, 0L));
  if (prec <= 0) return acc;
  CSeries t(zero, 1, 0, prec);  // (-q;q^2)_n / (zeta q^2, zeta^-1 q^2; q^2)_n
  t.at(0) = CycNum::one(static_cast<int>(c));
  for (long n = 0; n * n < prec; ++n) {
    if (n > 0) {
      t = t.truncated(prec - n * n);
      mul_one_minus(t, Rational(-1), 2 * n - 1);
      div_one_minus(t, z, 2 * n);
      div_one_minus(t, zi, 2 * n);
    }
    for (long j = 0; j < t.prec(); ++j)
      if (!t.at(j).is_zero()) acc.at(n * n + j) += t.at(j);
  }
  return acc;
}

/// (-q;q^2)_inf / (q^2;q^2)_inf, the zeta = 1 specialization of R2.
inline RSeries podp_generating_function(long prec) {
  return pochhammer_inf(1, 2, -1, prec) * qs_inv(pochhammer_inf(2, 2, 1, prec));
}

/// Lambert form (-q;q^2)/(q^2;q^2) (1 + sum_{n>=1} (1-z)(1-z^-1)(-1)^n q^(2n^2+n)(1+q^(2n)) /
/// ((1 - z q^(2n))(1 - z^-1 q^(2n)))), below q^prec.
inline CSeries r2_lambert(long a, long c, long prec) {
  if (c < 1) throw DomainError("c must be positive");
  const int ord = static_cast<int>(c);
  const CycNum z = detail::zeta_of(a, c), zi = detail::zeta_of(-a, c);
  const CycNum one = CycNum::one(ord);
  const CycNum w = (one - z) * (one - zi);
  CSeries inner(CycNum::zero(ord), 1, 0, std::max(prec, 0L));
  if (prec <= 0) return inner;
  inner.at(0) = one;
  for (long n = 1; 2 * n * n + n < prec; ++n) {
    const long lead = 2 * n * n + n;
    CSeries t(CycNum::zero(ord), 1, 0, prec - lead);
    t.at(0) = (n % 2) ? -w : w;
    mul_one_minus(t, Rational(-1), 2 * n);
    div_one_minus(t, z, 2 * n);
    div_one_minus(t, zi, 2 * n);
    for (long j = 0; j < t.prec(); ++j) inner.at(lead + j) += t.at(j);
  }
  return inner * podp_generating_function(prec);
}

/// zeta * sum_{n in Z} (-1)^n q^(2n^2+n) / (1 - zeta q^(2n)), i.e. A_2(a/c, -tau-1/2; 2tau).
inline CSeries appell_A2_special(long a, long c, long prec) {
  if (c < 1) throw DomainError("c must be positive");
  if (mod_floor(a, c) == 0) throw DomainError("appell_A2_special needs zeta != 1 (c does not divide a)");
  const int ord = static_cast<int>(c);
  const CycNum z = detail::zeta_of(a, c);
  const CycNum one = CycNum::one(ord);
  CSeries s(CycNum::zero(ord), 1, 0, std::max(prec, 0L));
  if (prec <= 0) return s;
  s.at(0) = z * inverse(one - z);
  // n >= 1: z (-1)^n q^(2n^2+n) sum_j z^j q^(2nj). Exponents grow with n, cut at 2n^2+n >= prec.
  for (long n = 1; 2 * n * n + n < prec; ++n) {
    const Rational sgn(n % 2 ? -1 : 1);
    for (long j = 0, x = 2 * n * n + n; x < prec; ++j, x += 2 * n) s.at(x) += detail::zeta_of(a * (j + 1), c) * sgn;
  }
  // n = -m <= -1: 1/(1 - z q^(-2m)) = -z^-1 q^(2m) / (1 - z^-1 q^(2m)), leaving
  // -(-1)^m q^(2m^2+m) sum_j z^-j q^(2mj); cut at 2m^2+m >= prec.
  for (long m = 1; 2 * m * m + m < prec; ++m) {
    const Rational sgn(m % 2 ? 1 : -1);
    for (long j = 0, x = 2 * m * m + m; x < prec; ++j, x += 2 * m) s.at(x) += detail::zeta_of(-a * j, c) * sgn;
  }
  return s;
}

// ---------------------------------------------------------------------------
// S(k,c;tau)

/// S(k,c; tau_scale * tau) below the rational bound prec, via the defining bilateral sum.
inline RSeries s_series(long k, long c, const Rational& prec, const Rational& tau_scale = Rational(1)) {
  detail::check_s_params(k, c);
  if (tau_scale.sign() <= 0) throw DomainError("tau_scale must be positive");
  const long e0 = s_prefactor_exp(k, c);
  const long base_prec = detail::prec_ceil(prec / tau_scale);
  const long ps = base_prec - e0;  // precision needed for the bilateral sum
  const long step = 4 * c * c, off = (1 + 4 * k - c) * c;

  std::vector<long> ns;
  for (long n = 0; detail::s_numerator_exp(c, n) < ps; ++n) ns.push_back(n);
  for (long n = -1; detail::s_numerator_exp(c, n) < ps; --n) ns.push_back(n);
  long lo = 0;
  for (long n : ns) {
    long e = step * n + off;
    lo = std::min(lo, detail::s_numerator_exp(c, n) - std::min(e, 0L));
  }
  RSeries sum(Rational(0), 1, lo, std::max(ps, lo));
  for (long n : ns) {
    const Rational sgn((n * c) % 2 ? -1 : 1);
    detail::add_lambert_term(sum, sgn, detail::s_numerator_exp(c, n), step * n + off);
  }
  // 1 / ((-1)^(c-1) q^(c^2), (-1)^(c-1) q^(3c^2), q^(4c^2); q^(4c^2))_inf
  RSeries inv_prod(Rational(0), 1, 0, std::max(ps - lo, 0L));
  if (inv_prod.prec() > 0) inv_prod.at(0) = Rational(1);
  const Rational s((c - 1) % 2 ? -1 : 1);
  for (long e = c * c; e < inv_prod.prec(); e += step) div_one_minus(inv_prod, s, e);
  for (long e = 3 * c * c; e < inv_prod.prec(); e += step) div_one_minus(inv_prod, s, e);
  for (long e = step; e < inv_prod.prec(); e += step) div_one_minus(inv_prod, Rational(1), e);

  RSeries out = qs_shift(sum * inv_prod, Rational(e0));
  if (tau_scale != Rational(1)) out = qs_substitute(out, tau_scale);
  return out.truncated(prec);
}

/// theta(c^2 tau + (c-1)/2; 4c^2 tau) from its half-integer-index sum, over Q(i). The product
/// form -i Q^(1/8) e^(-pi i v)(e^(2 pi i v), e^(-2 pi i v) Q, Q; Q)_inf is evaluated too and
/// must agree.
inline CSeries theta_special(long c, long prec) {
  const CycNum i = CycNum::zeta_pow(4, 1);
  const CycNum ic = CycNum::zeta_pow(4, c);
  CSeries sum(CycNum::zero(4), 1, 0, std::max(prec, 0L));
  // n = m + 1/2: exponent 2c^2 m^2 + 3c^2 m + c^2 >= 0, minimal at m in {-1, 0}
  for (long m = 0; 2 * c * c * m * m + 3 * c * c * m + c * c < prec; ++m)
    sum.at(2 * c * c * m * m + 3 * c * c * m + c * c) += ic * Rational((m * c) % 2 ? -1 : 1);
  for (long m = -1; 2 * c * c * m * m + 3 * c * c * m + c * c < prec; --m)
    sum.at(2 * c * c * m * m + 3 * c * c * m + c * c) += ic * Rational((m * c) % 2 ? -1 : 1);

  // e^(2 pi i v) = (-1)^(c-1) q^(c^2); -i Q^(1/8) e^(-pi i v) = -i * i^(1-c) = i^(-c)
  const int s = (c - 1) % 2 ? -1 : 1;
  RSeries prod = pochhammer_inf(Rational(c * c), Rational(4 * c * c), s, Rational(prec)) *
                 pochhammer_inf(Rational(3 * c * c), Rational(4 * c * c), s, Rational(prec)) *
                 pochhammer_inf(Rational(4 * c * c), Rational(4 * c * c), 1, Rational(prec));
  CSeries prod_form = qs_scale(prod, -i * CycNum::zeta_pow(4, 1 - c));
  if (!(prod_form == sum)) throw std::logic_error("theta sum and product forms disagree");
  return sum;
}

/// S(k,c;tau) recomputed as i^(-c) q^(1/8) q^(-(1+4k-2c)^2/8) mu((1+4k-c)c tau, c^2 tau + (c-1)/2;
/// 4c^2 tau), with theta in the mu denominator taken from its sum form over Q(i).
inline RSeries mu_special_s(long k, long c, const Rational& prec) {
  detail::check_s_params(k, c);
  const Rational shift = Rational(1, 8) - Rational((1 + 4 * k - 2 * c) * (1 + 4 * k - 2 * c), 8) +
                         Rational((1 + 4 * k - c) * c, 2);
  const long target = detail::prec_ceil(prec - shift);
  const long step = 4 * c * c, off = (1 + 4 * k - c) * c;

  // sum_n (-1)^n e^(pi i n(n+1) 4c^2 tau + 2 pi i n v) / (1 - e^(2 pi i n 4c^2 tau + 2 pi i u)),
  // e^(2 pi i n v) = q^(n c^2) (-1)^(n(c-1)); same exponent cut as s_series.
  std::vector<long> ns;
  for (long n = 0; detail::s_numerator_exp(c, n) < target; ++n) ns.push_back(n);
  for (long n = -1; detail::s_numerator_exp(c, n) < target; --n) ns.push_back(n);
  long lo = 0;
  for (long n : ns) lo = std::min(lo, detail::s_numerator_exp(c, n) - std::min(step * n + off, 0L));
  RSeries sum(Rational(0), 1, lo, std::max(target, lo));
  for (long n : ns) {
    const long sgn = ((n % 2) ? -1 : 1) * (((n * (c - 1)) % 2) ? -1 : 1);
    detail::add_lambert_term(sum, Rational(sgn), 2 * c * c * n * (n + 1) + n * c * c, step * n + off);
  }
  CSeries theta = theta_special(c, std::max(target - lo, 1L));
  CSeries mu = qs_shift(qs_mul(sum, qs_inv(theta)), shift);
  CSeries s = qs_scale(mu, CycNum::zeta_pow(4, -c));
  RSeries out(Rational(0), s.denom(), s.min_exp(), s.prec());
  for (long n = s.min_exp(); n < s.prec(); ++n) {
    if (s.at(n).is_zero()) continue;
    if (!s.at(n).is_rational()) throw std::logic_error("mu route produced a non-rational coefficient");
    out.at(n) = s.at(n)[0];
  }
  return out.compacted().truncated(prec);
}

/// 2 phi(-q) - f(q) and theta_4(0,q) / (-q;q)_inf, both below q^prec.
struct MockThetaSides {
  RSeries lhs;
  RSeries rhs;
};

/// f(q) = sum q^(n^2) / (-q;q)_n^2.
inline RSeries mock_theta_f(long prec) {
  RSeries acc(Rational(0), 1, 0, std::max(prec, 0L));
  if (prec <= 0) return acc;
  RSeries t(Rational(0), 1, 0, prec);
  t.at(0) = Rational(1);
  for (long n = 0; n * n < prec; ++n) {
    if (n > 0) {
      t = t.truncated(prec - n * n);
      div_one_minus(t, Rational(-1), n);
      div_one_minus(t, Rational(-1), n);
    }
    for (long j = 0; j < t.prec(); ++j) acc.at(n * n + j) += t.at(j);
  }
  return acc;
}

/// phi(q) = sum q^(n^2) / (-q^2;q^2)_n.
inline RSeries mock_theta_phi(long prec) {
  RSeries acc(Rational(0), 1, 0, std::max(prec, 0L));
  if (prec <= 0) return acc;
  RSeries t(Rational(0), 1, 0, prec);
  t.at(0) = Rational(1);
  for (long n = 0; n * n < prec; ++n) {
    if (n > 0) {
      t = t.truncated(prec - n * n);
      div_one_minus(t, Rational(-1), 2 * n);
    }
    for (long j = 0; j < t.prec(); ++j) acc.at(n * n + j) += t.at(j);
  }
  return acc;
}

inline MockThetaSides mock_theta_sides(long prec) {
  RSeries phi_neg = qs_negate_variable(mock_theta_phi(prec));
  RSeries lhs = phi_neg + phi_neg - mock_theta_f(prec);
  RSeries rhs = theta4(prec) * qs_inv(pochhammer_inf(1, 1, -1, Rational(prec)));
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// The holomorphic R2 - S combination

/// Coefficient (1 - z^a) z^-a (-1)^k (z^(-2ak) - z^(2ak+a)) of the k-th S term, in Q(zeta_c).
inline CycNum s_combination_coeff(long a, long c, long k) {
  const CycNum one = CycNum::one(static_cast<int>(c));
  CycNum w = (one - detail::zeta_of(a, c)) * detail::zeta_of(-a, c) *
             (detail::zeta_of(-2 * a * k, c) - detail::zeta_of(2 * a * k + a, c));
  return (k % 2) ? -w : w;
}

/// q^(-1/8) R2(zeta_c^a;q) - i^(-c) sum_k coeff_k i^c q^(-1/8) S(k,c;tau) over Q(zeta_lcm(4,c)),
/// below q^prec. Pole summands are dropped after checking their coefficient vanishes.
inline CSeries r2_minus_s_combination(long a, long c, const Rational& prec) {
  if (c < 1) throw DomainError("c must be positive");
  if (mod_floor(2 * a, c) == 0) throw DomainError("the combination needs c not dividing 2a");
  const int L = static_cast<int>(lcm_l(4, c));
  const Rational eighth(1, 8);
  CSeries r2 = qs_embed(r2_eulerian(a, c, detail::prec_ceil(prec + eighth)), L);
  CSeries out = qs_shift(r2, -eighth).truncated(prec);
  for (long k = 0; k < c; ++k) {
    CycNum w = s_combination_coeff(a, c, k);
    if (mod_floor(1 + 4 * k - c, 4 * c) == 0) {
      if (!w.is_zero()) throw std::logic_error("pole summand with a nonzero coefficient");
      continue;
    }
    if (w.is_zero()) continue;
    // i^(-c) * i^c cancels; kept explicit so the normalizations stay visible
    CycNum coef = CycNum::zeta_pow(L, -c * (L / 4)) * CycNum::zeta_pow(L, c * (L / 4)) * w.embed(L);
    RSeries sk = qs_shift(s_series(k, c, prec + eighth), -eighth);
    out = out - qs_scale(sk, coef);
  }
  return out.truncated(prec);
}

// ---------------------------------------------------------------------------
// Dissection identities

struct JFactor {
  long a;
  long e;
};

struct IdentityTerm {
  enum class Kind { S, J };
  Kind kind = Kind::J;
  std::vector<long> A;  // sum_j A[j-1] (zeta^j + zeta^-j)
  Rational qpow;
  long k = 0;                 // S only
  Rational tau_scale{1};      // S only
  std::vector<JFactor> num;   // J only
  std::vector<JFactor> den;   // J only
  int line = 0;               // source line, 0 when built in code
};

struct Identity {
  long a = 1;
  long c = 7;
  std::vector<std::vector<IdentityTerm>> residues;  // indexed by d in [0, c)
};

/// sum_j A[j-1] (zeta_c^j + zeta_c^-j).
inline CycNum symmetric_coefficient(long c, const std::vector<long>& A) {
  CycNum x = CycNum::zero(static_cast<int>(c));
  for (size_t j = 0; j < A.size(); ++j) {
    if (A[j] == 0) continue;
    long e = static_cast<long>(j) + 1;
    x += (detail::zeta_of(e, c) + detail::zeta_of(-e, c)) * Rational(A[j]);
  }
  return x;
}

namespace detail {

inline int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Lines where each term object starts, in document order: objects nested as
// {top} -> [residues] -> {residue} -> [terms] -> {term}.
inline std::vector<int> term_lines(const std::string& text) {
  std::vector<int> out;
  std::string stack;
  bool in_str = false, esc = false;
  int line = 1;
  for (char ch : text) {
    if (ch == '\n') ++line;
    if (in_str) {
      if (esc)
        esc = false;
      else if (ch == '\\')
        esc = true;
      else if (ch == '"')
        in_str = false;
      continue;
    }
    if (ch == '"') {
      in_str = true;
    } else if (ch == '{' || ch == '[') {
      if (ch == '{' && stack == "{[{[") out.push_back(line);
      stack.push_back(ch);
    } else if ((ch == '}' || ch == ']') && !stack.empty()) {
      stack.pop_back();
    }
  }
  return out;
}

inline Rational json_rational(const nlohmann::json& v, const char* what, int line) {
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
  } catch (const ParseError&) {
  }
  throw ParseError(std::string("bad rational for '") + what + "'", line);
}

inline long json_long(const nlohmann::json& v, const char* what, int line) {
  if (!v.is_number_integer()) throw ParseError(std::string("expected an integer for '") + what + "'", line);
  return v.get<long>();
}

inline std::vector<JFactor> json_factors(const nlohmann::json& v, const char* what, long c, int line) {
  std::vector<JFactor> out;
  if (!v.is_array()) throw ParseError(std::string("'") + what + "' must be a list of [a, e] pairs", line);
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 2) throw ParseError(std::string("'") + what + "' entries are [a, e] pairs", line);
    JFactor f{json_long(p[0], what, line), json_long(p[1], what, line)};
    if (f.a < 0 || f.a > 2 * c) throw ParseError("J index " + std::to_string(f.a) + " outside [0, 2c]", line);
    if (f.e <= 0) throw ParseError("J exponents must be positive integers", line);
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

inline Identity parse_identity(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), detail::line_of_byte(text, e.byte));
  }
  auto lines = detail::term_lines(text);
  size_t term_index = 0;
  Identity id;
  if (!doc.is_object() || !doc.contains("c") || !doc.contains("residues"))
    throw ParseError("identity needs top-level 'a', 'c' and 'residues'", 1);
  id.a = detail::json_long(doc.value("a", nlohmann::json(1)), "a", 1);
  id.c = detail::json_long(doc["c"], "c", 1);
  if (id.c < 3 || id.c % 2 == 0) throw ParseError("identity files are supported for odd c >= 3", 1);
  if (mod_floor(2 * id.a, id.c) == 0) throw ParseError("identity needs c not dividing 2a", 1);
  id.residues.assign(static_cast<size_t>(id.c), {});
  std::vector<bool> seen(static_cast<size_t>(id.c), false);
  if (!doc["residues"].is_array()) throw ParseError("'residues' must be a list", 1);
  for (const auto& res : doc["residues"]) {
    int line = term_index < lines.size() ? lines[term_index] : 0;
    long d = detail::json_long(res.value("d", nlohmann::json()), "d", line);
    if (d < 0 || d >= id.c) throw ParseError("residue d out of range", line);
    if (seen[static_cast<size_t>(d)]) throw ParseError("residue listed twice", line);
    seen[static_cast<size_t>(d)] = true;
    if (!res.contains("terms") || !res["terms"].is_array()) throw ParseError("residue needs a 'terms' list", line);
    for (const auto& tj : res["terms"]) {
      IdentityTerm t;
      t.line = term_index < lines.size() ? lines[term_index] : 0;
      ++term_index;
      if (!tj.is_object()) throw ParseError("term must be an object", t.line);
      std::string kind = tj.value("kind", "");
      if (!tj.contains("A") || !tj["A"].is_array() || tj["A"].size() != static_cast<size_t>((id.c - 1) / 2))
        throw ParseError("'A' must list (c-1)/2 integers", t.line);
      for (const auto& x : tj["A"]) t.A.push_back(detail::json_long(x, "A", t.line));
      t.qpow = tj.contains("qpow") ? detail::json_rational(tj["qpow"], "qpow", t.line) : Rational(0);
      if (kind == "S") {
        t.kind = IdentityTerm::Kind::S;
        t.k = detail::json_long(tj.value("k", nlohmann::json()), "k", t.line);
        t.tau_scale = tj.contains("tau_scale") ? detail::json_rational(tj["tau_scale"], "tau_scale", t.line) : Rational(1);
        if (t.tau_scale.sign() <= 0) throw ParseError("tau_scale must be positive", t.line);
        try {
          detail::check_s_params(t.k, id.c);
        } catch (const DomainError& e) {
          throw ParseError(e.what(), t.line);
        }
      } else if (kind == "J") {
        t.kind = IdentityTerm::Kind::J;
        t.num = detail::json_factors(tj.value("num", nlohmann::json::array()), "num", id.c, t.line);
        t.den = detail::json_factors(tj.value("den", nlohmann::json::array()), "den", id.c, t.line);
      } else {
        throw ParseError("term kind must be \"S\" or \"J\"", t.line);
      }
      id.residues[static_cast<size_t>(d)].push_back(std::move(t));
    }
  }
  return id;
}

inline Identity load_identity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open identity file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_identity(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

/// prod J_a^e over num / prod J_a^e over den with J_0 = (q^m;q^m), J_a = (q^a, q^(m-a); q^m),
/// m = 4c, below q^prec.
inline RSeries j_quotient(long c, const std::vector<JFactor>& num, const std::vector<JFactor>& den,
                          const Rational& prec) {
  const long m = 4 * c;
  const long p = std::max(detail::prec_ceil(prec), 0L);
  RSeries s(Rational(0), 1, 0, p);
  if (p > 0) s.at(0) = Rational(1);
  const Rational one(1);
  auto apply = [&](const JFactor& f, bool divide) {
    auto step = [&](long start) {
      for (long e = start; e < p; e += m)
        for (long t = 0; t < f.e; ++t) divide ? div_one_minus(s, one, e) : mul_one_minus(s, one, e);
    };
    if (f.a == 0) {
      step(m);
    } else {
      step(f.a);
      step(m - f.a);
    }
  };
  for (const auto& f : num) apply(f, false);
  for (const auto& f : den) apply(f, true);
  return s;
}

/// One term of R2_d(q), below q^prec, over Q(zeta_c).
inline CSeries assemble_term(const Identity& id, const IdentityTerm& t, const Rational& prec) {
  const CycNum coef = symmetric_coefficient(id.c, t.A);
  RSeries body = t.kind == IdentityTerm::Kind::S ? s_series(t.k, id.c, prec - t.qpow, t.tau_scale)
                                                 : j_quotient(id.c, t.num, t.den, prec - t.qpow);
  return qs_scale(qs_shift(body, t.qpow), coef).truncated(prec);
}

/// R2_d(q) below q^prec.
inline CSeries assemble_residue(const Identity& id, long d, const Rational& prec, unsigned workers = 1) {
  if (d < 0 || d >= id.c) throw DomainError("residue out of range");
  const auto& terms = id.residues[static_cast<size_t>(d)];
  std::vector<CSeries> parts(terms.size());
  parallel_for(terms.size(), workers, [&](size_t i) { parts[i] = assemble_term(id, terms[i], prec); });
  CSeries acc(CycNum::zero(static_cast<int>(id.c)), to_long(prec.den()), 0, to_long(prec.num()));
  for (const auto& p : parts) acc = acc + p;
  return acc.compacted().truncated(prec);
}

/// sum_d q^d R2_d(q^c) below q^prec: the right side of the dissection identity.
inline CSeries assemble_full(const Identity& id, long prec, unsigned workers = 1) {
  CSeries acc(CycNum::zero(static_cast<int>(id.c)), 1, 0, std::max(prec, 0L));
  for (long d = 0; d < id.c; ++d) {
    CSeries r = assemble_residue(id, d, Rational(prec - d, id.c), workers);
    acc = acc + qs_shift(qs_substitute(r, Rational(id.c)), Rational(d));
  }
  return acc.compacted();
}

/// Integer-coefficient series R2_{r,0,c}(d;q): every coefficient of R2_d projected onto
/// zeta^r + zeta^-r.
inline RSeries project_series(const CSeries& x, int r) {
  RSeries out(Rational(0), x.denom(), x.min_exp(), x.prec());
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!x.at(n).is_zero()) out.at(n) = project_rank_component(x.at(n), r);
  return out;
}

inline RSeries rank_diff_from_identity(const Identity& id, int r, long d, const Rational& prec, unsigned workers = 1) {
  if (id.c != 7) throw DomainError("rank-difference projection is implemented for c = 7");
  return project_series(assemble_residue(id, d, prec, workers), r);
}

}  // namespace mockdissect
