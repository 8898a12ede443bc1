#pragma once

// Valence-formula certification of a dissection identity
//   R2(zeta_c^a; q) = sum_d q^d R2_d(q^c).
//
// Multiplying by q^(-1/8) and P = eta(4 tau) eta(tau) / eta(2 tau) turns both sides into weight-one
// forms on Gamma0(4c^2) ∩ Gamma1(4c): the left side is P (R2 - sum_k w_k S(k,c;tau)) q^(-1/8), the
// S terms of the identity supplying the sum, and every J-quotient term is an eta quotient of
// level 4c^2. Dividing by one such quotient g1 gives a modular function F. Each factor of g1 is
// nonvanishing on the upper half-plane, so F has no poles there and interior orders are >= 0.
// With B the width-weighted sum of lower bounds at the cusps other than infinity, a nonzero F
// has order at most -B at infinity; vanishing through exponent K = floor(-B) + 1 forces F = 0.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mockdissect/cusporders.hpp"
#include "mockdissect/errors.hpp"
#include "mockdissect/mockforms.hpp"
#include "mockdissect/modgroup.hpp"
#include "mockdissect/parallel.hpp"
#include "mockdissect/partitions.hpp"
#include "mockdissect/qseries.hpp"

namespace mockdissect {

/// A J-quotient term of the identity: residue d, position in that residue's term list.
struct TermRef {
  long d = 0;
  long index = 0;
  std::string to_string() const { return std::to_string(d) + ":" + std::to_string(index); }
  static TermRef parse(const std::string& s) {
    auto p = s.find(':');
    if (p == std::string::npos) throw ParseError("term reference must be <residue>:<index>", 0);
    try {
      return {std::stol(s.substr(0, p)), std::stol(s.substr(p + 1))};
    } catch (const std::exception&) {
      throw ParseError("bad term reference '" + s + "'", 0);
    }
  }
};

inline const IdentityTerm& term_at(const Identity& id, const TermRef& t) {
  if (t.d < 0 || t.d >= static_cast<long>(id.residues.size()) || t.index < 0 ||
      t.index >= static_cast<long>(id.residues[t.d].size()))
    throw DomainError("no term " + t.to_string() + " in the identity");
  return id.residues[t.d][t.index];
}

/// The first J-quotient term of residue 0.
inline TermRef default_g1(const Identity& id) {
  for (long i = 0; i < static_cast<long>(id.residues.at(0).size()); ++i)
    if (id.residues[0][i].kind == IdentityTerm::Kind::J) return {0, i};
  throw DomainError("residue 0 has no J-quotient term to divide by");
}

/// Eta-quotient factors of g1 = P times the term's quotient; the term must map with residual 0.
inline std::vector<EtaFactor> g1_factors(const Identity& id, const TermRef& ref) {
  const IdentityTerm& t = term_at(id, ref);
  if (t.kind != IdentityTerm::Kind::J) throw DomainError("g1 must be a J-quotient term");
  auto eq = j_term_eta_quotient(id, t, ref.d);
  if (eq.residual != Rational(0)) throw DomainError("g1 term is not an eta quotient of the group's level");
  return eq.factors;
}

// ---------------------------------------------------------------------------
// The difference LHS - RHS

/// Throws unless, for every k, the S terms of the identity sum to w_k S(k,c;tau) after
/// q -> q^c, w_k the coefficient of the holomorphic combination.
inline void check_s_terms(const Identity& id) {
  std::map<long, CycNum> got;
  for (long d = 0; d < static_cast<long>(id.residues.size()); ++d)
    for (const auto& t : id.residues[d]) {
      if (t.kind != IdentityTerm::Kind::S) continue;
      if (t.tau_scale != Rational(1, id.c) || Rational(d) + Rational(id.c) * t.qpow != Rational(0))
        throw DomainError("S term at line " + std::to_string(t.line) + " is not S(k,c;tau) after q -> q^c");
      auto [it, fresh] = got.try_emplace(t.k, CycNum::zero(static_cast<int>(id.c)));
      it->second += symmetric_coefficient(id.c, t.A);
    }
  for (long k = 0; k < id.c; ++k) {
    CycNum want = s_combination_coeff(id.a, id.c, k);
    CycNum have = got.count(k) ? got.at(k) : CycNum::zero(static_cast<int>(id.c));
    if (have != want)
      throw DomainError("S(" + std::to_string(k) + ") coefficients sum to " + have.to_string() + ", expected " +
                        want.to_string());
  }
}

/// (q, q^3, q^4; q^4)_inf (R2(zeta_c^a; q) - sum_d q^d R2_d(q^c)) below q^prec, straight from the
/// definitions. Valid for any identity, modular or not.
inline CSeries build_difference_literal(const Identity& id, long prec, unsigned workers = 1) {
  const long p = std::max(prec, 0L);
  CSeries lhs = r2_eulerian(id.a, id.c, p);
  CSeries rhs = assemble_full(id, p, workers);
  RSeries P = qs_shift(eta_quotient(weight_one_prefactor(), Rational(p) + Rational(1, 8)), Rational(-1, 8));
  return qs_mul(lhs - rhs, P).truncated(Rational(p)).compacted();
}

/// LHS - RHS below q^prec as a weight-one form of level 4c^2: P times the holomorphic
/// R2 - S combination, minus the J-quotient terms as eta quotients. Throws if a term has a
/// nonzero residual exponent (it would not be modular of the group's level) or the S terms do
/// not match the combination.
inline CSeries build_difference(const Identity& id, long prec, unsigned workers = 1) {
  check_s_terms(id);
  const long p = std::max(prec, 0L);
  const int L = static_cast<int>(lcm_l(4, id.c));
  std::vector<std::pair<long, const IdentityTerm*>> jterms;
  for (long d = 0; d < static_cast<long>(id.residues.size()); ++d)
    for (const auto& t : id.residues[d])
      if (t.kind == IdentityTerm::Kind::J) jterms.emplace_back(d, &t);
  std::vector<EtaQuotientTerm> eqs(jterms.size());
  for (size_t i = 0; i < jterms.size(); ++i) {
    eqs[i] = j_term_eta_quotient(id, *jterms[i].second, jterms[i].first);
    if (eqs[i].residual != Rational(0))
      throw DomainError("term at line " + std::to_string(jterms[i].second->line) + " leaves q^" +
                        eqs[i].residual.to_string() + " after mapping to eta quotients");
  }
  CSeries comb = r2_minus_s_combination(id.a, id.c, Rational(p) - Rational(1, 8));
  const Rational comb_lead(comb.valuation(), comb.denom());
  RSeries P = eta_quotient(weight_one_prefactor(), Rational(p) - comb_lead);
  CSeries out = qs_mul(comb, P).truncated(Rational(p)).compacted();

  // RHS = sum_j (zeta^j + zeta^-j) R_j with R_j = sum_t A_t[j] (eta quotient of t): the inner
  // sums stay over Z, so only (c-1)/2 cyclotomic scalings are needed.
  std::vector<RSeries> eta(jterms.size());
  parallel_for(jterms.size(), workers, [&](size_t i) { eta[i] = eta_quotient(eqs[i].factors, Rational(p)).compacted(); });
  long lo = 0;
  for (size_t i = 0; i < eta.size(); ++i)
    if (eta[i].denom() != 1)
      throw DomainError("term at line " + std::to_string(jterms[i].second->line) + " has nonintegral exponents");
  for (const auto& e : eta) lo = std::min(lo, e.min_exp());
  const size_t width = static_cast<size_t>((id.c - 1) / 2);
  std::vector<RSeries> R(width, RSeries(Rational(0), 1, lo, p));
  for (size_t i = 0; i < jterms.size(); ++i) {
    const auto& A = jterms[i].second->A;
    if (A.size() != width) throw DomainError("coefficient list has the wrong length");
    for (size_t j = 0; j < width; ++j) {
      if (A[j] == 0) continue;
      const Rational aj(A[j]);
      for (long n = eta[i].min_exp(); n < std::min(p, eta[i].prec()); ++n) R[j].at(n).add_product(eta[i].at(n), aj);
    }
  }
  for (size_t j = 0; j < width; ++j) {
    const long jj = static_cast<long>(j) + 1;
    const CycNum z = (CycNum::zeta_pow(static_cast<int>(id.c), jj) + CycNum::zeta_pow(static_cast<int>(id.c), -jj)).embed(L);
    out = out - qs_scale(R[j], z);
  }
  out = out.truncated(Rational(p));
  for (long n = out.min_exp(); n < out.prec(); ++n)
    if (n % out.denom() != 0 && !out.at(n).is_zero())
      throw DomainError("nonintegral exponent q^" + Rational(n, out.denom()).to_string() +
                        " in LHS - RHS: the identity data is inconsistent");
  return out.compacted();
}

// ---------------------------------------------------------------------------
// Certificates

struct CertificateRow {
  Cusp cusp;
  long width = 1;
  OrderBound bound;  // order of (LHS - RHS) / g1 at the cusp, width-free
  Rational ord;      // width * bound
};

struct Certificate {
  GroupSpec group{196, 28};
  TermRef g1;
  std::vector<EtaFactor> g1_eta;
  Rational g1_order_at_infinity;
  std::vector<CertificateRow> rows;
  Rational total_noninf;
  long required_order = 1;
  long verified_through = -1;
  bool pass = false;
  std::optional<std::pair<Rational, std::string>> witness;  // first nonzero exponent and coefficient
  std::string note;
};

/// K = floor(-B) + 1 when B < 0, else 1.
inline long required_order(const Rational& B) {
  if (B >= Rational(0)) return 1;
  return to_long((-B).floor()) + 1;
}

/// Lower bounds for LHS - RHS at every cusp of G except infinity, before division by g1.
inline std::vector<std::pair<std::pair<Cusp, long>, OrderBound>> difference_bounds(const Identity& id,
                                                                                  const GroupSpec& G,
                                                                                  unsigned workers = 1) {
  auto cusps = cusp_set(G);
  std::vector<std::pair<std::pair<Cusp, long>, OrderBound>> out(cusps.size());
  parallel_for(cusps.size(), workers, [&](size_t i) { out[i] = {cusps[i], ord_bound_difference(id, cusps[i].first)}; });
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& r) { return r.first.first.is_infinity(); }),
            out.end());
  return out;
}

/// Rows and B for a given g1 from precomputed difference bounds.
inline std::pair<std::vector<CertificateRow>, Rational> rows_for_g1(
    const std::vector<std::pair<std::pair<Cusp, long>, OrderBound>>& diff, const std::vector<EtaFactor>& g1) {
  std::vector<CertificateRow> rows;
  Rational B(0);
  for (const auto& [cw, b] : diff) {
    OrderBound ob = b - ord_eta_quotient(g1, cw.first);
    Rational ord = ob.value * Rational(cw.second);
    B += ord;
    rows.push_back({cw.first, cw.second, ob, ord});
  }
  return {rows, B};
}

/// B for every admissible g1 among the identity's J-quotient terms, best (largest) first.
inline std::vector<std::pair<TermRef, Rational>> search_g1(const Identity& id, const GroupSpec& G,
                                                          unsigned workers = 1) {
  auto diff = difference_bounds(id, G, workers);
  std::vector<std::pair<TermRef, Rational>> out;
  for (long d = 0; d < static_cast<long>(id.residues.size()); ++d)
    for (long i = 0; i < static_cast<long>(id.residues[d].size()); ++i) {
      if (id.residues[d][i].kind != IdentityTerm::Kind::J) continue;
      auto eq = j_term_eta_quotient(id, id.residues[d][i], d);
      if (eq.residual != Rational(0)) continue;
      out.emplace_back(TermRef{d, i}, rows_for_g1(diff, eq.factors).second);
    }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  return out;
}

namespace detail {

// First nonzero coefficient of x below its precision, as (exponent, coefficient text).
inline std::optional<std::pair<Rational, std::string>> first_nonzero(const CSeries& x) {
  for (long n = x.min_exp(); n < x.prec(); ++n)
    if (!x.at(n).is_zero()) return std::make_pair(Rational(n, x.denom()), x.at(n).to_string());
  return std::nullopt;
}

inline constexpr const char* kInteriorNote =
    "(LHS-RHS) is holomorphic on the upper half-plane and g1 is a product of eta and generalized eta "
    "functions, which do not vanish there, so every interior order of (LHS-RHS)/g1 is >= 0.";

}  // namespace detail

/// Full certificate. Throws DomainError when prec_cap is below the required order.
inline Certificate valence_certificate(const Identity& id, const GroupSpec& G, const TermRef& g1, long prec_cap,
                                       unsigned workers = 1) {
  Certificate cert;
  cert.group = G;
  cert.g1 = g1;
  cert.g1_eta = g1_factors(id, g1);
  cert.g1_order_at_infinity = eta_quotient_order(cert.g1_eta);
  if (!cert.g1_order_at_infinity.is_integer()) throw DomainError("g1 has a nonintegral order at infinity");
  const long g1_lead = to_long(cert.g1_order_at_infinity.floor());

  // A term that is not modular of the group's level cannot be bounded; the literal difference
  // still decides whether the identity fails.
  bool modular = true;
  std::string why;
  try {
    check_s_terms(id);
    for (long d = 0; d < static_cast<long>(id.residues.size()); ++d)
      for (const auto& t : id.residues[d])
        if (t.kind == IdentityTerm::Kind::J && j_term_eta_quotient(id, t, d).residual != Rational(0))
          throw DomainError("term at line " + std::to_string(t.line) + " is not modular of level " +
                            std::to_string(G.level()));
  } catch (const DomainError& e) {
    modular = false;
    why = e.what();
  }

  if (!modular) {
    const long cap = prec_cap + std::max(g1_lead, 0L) + 1;
    for (long p = std::min(64L, cap);; p = std::min(2 * p, cap)) {
      CSeries D = build_difference_literal(id, p, workers);
      CSeries F = qs_div(D, eta_quotient(cert.g1_eta, Rational(p + 1)));
      cert.verified_through = F.prec() / F.denom() - 1;
      cert.witness = detail::first_nonzero(F);
      if (cert.witness) break;
      if (p == cap) throw DomainError(why + "; no nonzero coefficient below q^" + std::to_string(F.prec()));
    }
    cert.note = why + ". The literal difference is nonzero, so the identity is false.";
    return cert;
  }

  auto diff = difference_bounds(id, G, workers);
  std::tie(cert.rows, cert.total_noninf) = rows_for_g1(diff, cert.g1_eta);
  cert.required_order = required_order(cert.total_noninf);
  if (prec_cap < cert.required_order)
    throw DomainError("precision cap " + std::to_string(prec_cap) + " is below the required order " +
                      std::to_string(cert.required_order));

  // F = D / g1 must be known through exponent K, so D through K + ord(g1). Precision grows
  // geometrically so a false identity is caught early.
  const long need = cert.required_order + g1_lead + 1;
  CSeries F;
  for (long p = std::min(64L, need);;) {
    CSeries D = build_difference(id, p, workers);
    RSeries g = eta_quotient(cert.g1_eta, Rational(p - g1_lead + 1) + cert.g1_order_at_infinity);
    F = qs_div(D, g);
    const long known = F.prec() / F.denom();
    if (detail::first_nonzero(F) || known > cert.required_order) break;
    p = p < need ? (4 * p >= need ? need : 4 * p) : p + cert.required_order + 1 - known;
  }
  cert.verified_through = F.prec() / F.denom() - 1;
  cert.witness = detail::first_nonzero(F);
  cert.pass = !cert.witness && cert.verified_through >= cert.required_order;
  cert.note = detail::kInteriorNote;
  return cert;
}

inline nlohmann::ordered_json certificate_json(const Certificate& c) {
  using J = nlohmann::ordered_json;
  J j;
  j["group"] = {{"N", c.group.N}, {"M", c.group.M}};
  j["g1"] = c.g1.to_string();
  J f = J::array();
  for (const auto& e : c.g1_eta) f.push_back({{"N", e.N}, {"rho", e.rho}, {"power", e.power}});
  j["g1_factors"] = f;
  j["g1_order_at_infinity"] = c.g1_order_at_infinity.to_string();
  J rows = J::array();
  for (const auto& r : c.rows)
    rows.push_back({{"cusp", r.cusp.to_string()},
                    {"width", r.width},
                    {"ord_lower_bound", r.bound.value.to_string()},
                    {"ORD", r.ord.to_string()},
                    {"exact", r.bound.exact}});
  j["rows"] = rows;
  j["total_noninf"] = c.total_noninf.to_string();
  j["required_order"] = c.required_order;
  j["verified_through"] = c.verified_through;
  if (c.pass) {
    j["verdict"] = "PASS";
  } else {
    J v = {{"status", "FAIL"}};
    if (c.witness) v["first_nonzero"] = {{"exponent", c.witness->first.to_string()}, {"coefficient", c.witness->second}};
    j["verdict"] = v;
  }
  j["reasoning"] =
      "K = floor(-B) + 1 for B < 0, else 1. A nonzero modular function has total order 0 over a fundamental domain; "
      "with interior orders >= 0 and cusp orders >= the bounds above, its order at infinity is <= -B < K, so vanishing "
      "through q^K forces (LHS-RHS)/g1 = 0.";
  j["note"] = c.note;
  return j;
}

// ---------------------------------------------------------------------------
// Rank differences

struct RankDiffReport {
  int r = 0;
  long d = 0;
  bool integral = true;
  long checked_through = -1;  // last exponent n compared against the Eulerian oracle
  long enumerated_through = -1;  // last n compared against enumeration
  std::optional<long> first_disagreement;
  bool ok() const { return integral && !first_disagreement; }
};

/// R2_{r,0,c}(d; q) from the identity against R2(zeta;q) from its Eulerian form through q^(prec-1),
/// and against direct rank counts for partitions of size at most enum_cap.
inline std::vector<RankDiffReport> check_rank_differences(const Identity& id, const std::vector<int>& rs,
                                                          const std::vector<long>& ds, long prec,
                                                          int enum_cap = kDefaultEnumerationCap, unsigned workers = 1) {
  if (id.c != 7) throw DomainError("rank differences are implemented for c = 7");
  const long c = id.c;
  CSeries eul = r2_eulerian(id.a, c, c * prec);
  std::vector<RankDiffReport> out;
  for (long d : ds) {
    CSeries res = assemble_residue(id, d, Rational(prec), workers);
    for (int r : rs) {
      RankDiffReport rep;
      rep.r = r;
      rep.d = d;
      RSeries mine = project_series(res, r).compacted();
      for (long n = 0; n < prec; ++n) {
        Rational v = mine.coeff_at(Rational(n));
        if (!v.is_integer()) rep.integral = false;
        // the Eulerian series carries zeta^(a m) for rank m; a = 1 here so components are N2 differences
        Rational want = project_rank_component(eul.coeff_at(Rational(c * n + d)), r);
        if (v != want && !rep.first_disagreement) rep.first_disagreement = n;
        rep.checked_through = n;
        const long size = c * n + d;
        if (size <= enum_cap) {
          BigInt direct = n2_mod(r, c, static_cast<int>(size), enum_cap) - n2_mod(0, c, static_cast<int>(size), enum_cap);
          if (v != Rational(direct) && !rep.first_disagreement) rep.first_disagreement = n;
          rep.enumerated_through = n;
        }
      }
      out.push_back(rep);
    }
  }
  return out;
}

}  // namespace mockdissect
