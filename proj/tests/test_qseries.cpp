#include <gtest/gtest.h>

#include <map>

#include "mockdissect/qseries.hpp"

using namespace mockdissect;

namespace {

RSeries poly(std::map<long, long> terms, long prec, long denom = 1) {
  RSeries s(Rational(0), denom, 0, prec);
  for (auto [e, c] : terms) s.at(e) = Rational(c);
  return s;
}

// Partition counts by the standard recursion over parts, independent of the series engine.
std::vector<long> partition_counts(int n, bool distinct_odd_only) {
  std::vector<std::vector<long>> ways(static_cast<size_t>(n + 1), std::vector<long>(static_cast<size_t>(n + 2), 0));
  // ways[m][k]: partitions of m with parts <= k (honoring the odd rule)
  std::vector<long> out(static_cast<size_t>(n + 1), 0);
  std::function<long(int, int)> count = [&](int m, int k) -> long {
    if (m == 0) return 1;
    if (k == 0) return 0;
    long total = count(m, k - 1);
    if (k % 2 == 1 && distinct_odd_only) {
      if (k <= m) total += count(m - k, k - 1);
    } else {
      for (int used = k; used <= m; used += k) total += count(m - used, k - 1);
    }
    return total;
  };
  for (int m = 0; m <= n; ++m) out[static_cast<size_t>(m)] = count(m, m);
  return out;
}

}  // namespace

TEST(QSeries, BasicArithmetic) {
  auto a = poly({{0, 1}, {1, 1}}, 10), b = poly({{0, 1}, {1, -1}}, 8);
  auto p = a * b;
  EXPECT_EQ(p.precision(), Rational(8));
  EXPECT_EQ(p.coeff_at(0), Rational(1));
  EXPECT_EQ(p.coeff_at(2), Rational(-1));
  EXPECT_EQ(p.coeff_at(1), Rational(0));
  EXPECT_EQ(a + poly({}, 10), a);

  auto h = qs_shift(RSeries::constant(Rational(1), Rational(5), Rational(0)), Rational(1, 2));
  auto t = qs_shift(RSeries::constant(Rational(1), Rational(5), Rational(0)), Rational(1, 3));
  auto ht = h * t;
  EXPECT_EQ(ht.denom(), 6);
  EXPECT_EQ(ht.coeff_at(Rational(5, 6)), Rational(1));
}

TEST(QSeries, PrecisionIsAContract) {
  auto a = poly({{0, 1}, {1, 2}}, 4);
  EXPECT_EQ(coeff_at(a, Rational(1)), Rational(2));
  EXPECT_EQ(coeff_at(qs_shift(a, Rational(1, 2)), Rational(1, 3)), Rational(0));
  EXPECT_THROW(coeff_at(a, Rational(4)), PrecisionError);
  EXPECT_THROW(coeff_at(a, Rational(9, 2)), PrecisionError);
}

TEST(QSeries, Inverse) {
  auto g = qs_inv(poly({{0, 1}, {1, -1}}, 20));
  for (int n = 0; n < 20; ++n) EXPECT_EQ(g.coeff_at(n), Rational(1));
  auto pinv = qs_inv(pochhammer_inf(1, 1, 1, 40));
  auto p = partition_counts(39, false);
  for (int n = 0; n < 40; ++n) EXPECT_EQ(pinv.coeff_at(n), Rational(p[static_cast<size_t>(n)])) << n;
  EXPECT_EQ(pinv.coeff_at(4), Rational(5));

  auto u = poly({{0, 3}, {1, 1}, {4, -2}}, 30);
  auto shifted = qs_shift(u, Rational(2));
  auto inv_shifted = qs_inv(shifted);
  EXPECT_EQ(inv_shifted.min_exponent(), Rational(-2));
  EXPECT_EQ(inv_shifted, qs_shift(qs_inv(u), Rational(-2)));
  EXPECT_EQ(qs_inv(qs_inv(u)), u);
  EXPECT_THROW(qs_inv(poly({}, 5)), DomainError);
}

TEST(QSeries, ShiftAndSubstitute) {
  auto s = qs_substitute(poly({{0, 1}, {28, 1}}, 40), Rational(1, 7));
  EXPECT_EQ(s.coeff_at(4), Rational(1));
  EXPECT_EQ(s.coeff_at(0), Rational(1));
  EXPECT_EQ(s.precision(), Rational(40, 7));
  auto one = RSeries::constant(Rational(1), Rational(3), Rational(0));
  EXPECT_EQ(qs_shift(one, Rational(-1, 8)).min_exponent(), Rational(-1, 8));
  auto x = poly({{0, 2}, {3, -1}, {5, 7}}, 9);
  EXPECT_EQ(qs_substitute(qs_substitute(x, Rational(1, 7)), Rational(7)), x);
}

TEST(QSeries, Pochhammer) {
  auto e = pochhammer_inf(1, 1, 1, 30);
  std::map<long, long> pent;
  for (long k = -5; k <= 5; ++k) pent[k * (3 * k - 1) / 2] += (k % 2 == 0) ? 1 : -1;
  for (long n = 0; n < 30; ++n) EXPECT_EQ(e.coeff_at(n), Rational(pent.count(n) ? pent[n] : 0)) << n;

  auto po = pochhammer_inf(1, 2, -1, 60) * qs_inv(pochhammer_inf(2, 2, 1, 60));
  EXPECT_EQ(po.coeff_at(4), Rational(3));
  auto ref = partition_counts(59, true);
  for (int n = 0; n < 60; ++n) EXPECT_EQ(po.coeff_at(n), Rational(ref[static_cast<size_t>(n)])) << n;

  EXPECT_EQ(pochhammer_inf(49, 196, 1, 400).coeff_at(0), Rational(1));
  EXPECT_THROW(pochhammer_inf(0, 1, 1, 10), DomainError);
  auto euler = pochhammer_inf(1, 1, -1, 80) * pochhammer_inf(1, 2, 1, 80);
  EXPECT_EQ(euler, RSeries::constant(Rational(1), Rational(80), Rational(0)));
}

TEST(QSeries, EtaAndGeneralizedEta) {
  auto eta = eta_series(1, 10);
  EXPECT_EQ(eta.min_exponent(), Rational(1, 24));
  EXPECT_EQ(eta.valuation(), eta.min_exp());
  auto quot = eta_series(2, 50) * qs_inv(eta_series(1, 50) * eta_series(4, 50));
  auto po = partition_counts(40, true);
  for (int n = 0; n < 40; ++n) EXPECT_EQ(quot.coeff_at(Rational(n) - Rational(1, 8)), Rational(po[static_cast<size_t>(n)]));
  auto p = eta_series(4, 50) * eta_series(1, 50) * qs_inv(eta_series(2, 50));
  auto one = (p * quot).truncated(Rational(30));
  EXPECT_EQ(one, RSeries::constant(Rational(1), Rational(30), Rational(0)));

  auto f41 = geta_f(4, 1, 20);
  EXPECT_EQ(f41.coeff_at(Rational(1, 8)), Rational(1));
  EXPECT_EQ(Rational(f41.valuation(), f41.denom()), Rational(1, 8));
  auto f = geta_f(196, 7, 400);
  EXPECT_EQ(Rational(f.valuation(), f.denom()), Rational(169, 8));
  auto half = geta_f(28, 14, 100);
  EXPECT_EQ(half.coeff_at(0), Rational(1));
  EXPECT_EQ(half, pochhammer_inf(14, 28, 1, 100) * pochhammer_inf(14, 28, 1, 100) * pochhammer_inf(28, 28, 1, 100));
  for (long rho : {1, 3, 5}) {
    EXPECT_EQ(geta_f(12, rho, 80), geta_f(12, 12 - rho, 80));
    EXPECT_EQ(geta_f(12, rho, 80), geta_f(12, rho + 12, 80));
    EXPECT_EQ(geta_f(12, rho, 80), geta_f(12, -rho, 80));
  }
  EXPECT_THROW(geta_f(12, 24, 10), DomainError);
}

TEST(QSeries, Theta4) {
  auto t = theta4(200);
  EXPECT_EQ(t.coeff_at(0), Rational(1));
  EXPECT_EQ(t.coeff_at(1), Rational(-2));
  EXPECT_EQ(t.coeff_at(3), Rational(0));
  EXPECT_EQ(t.coeff_at(4), Rational(2));
}

TEST(QSeries, Dissect) {
  auto x = poly({{0, 1}, {1, 1}, {2, 3}, {3, 1}}, 10);
  EXPECT_EQ(dissect(x, 2, 0), poly({{0, 1}, {2, 3}}, 10));
  RSeries sum = dissect(x, 3, 0);
  for (long r = 1; r < 3; ++r) sum = sum + dissect(x, 3, r);
  EXPECT_EQ(sum, x);
  auto y = qs_shift(poly({{0, 1}, {7, 1}}, 10), Rational(-1));
  EXPECT_EQ(dissect(y, 7, 6), y);
  EXPECT_THROW(dissect(qs_shift(x, Rational(1, 2)), 2, 0), DomainError);
}

TEST(QSeries, CyclotomicCoefficientsAndSerialization) {
  auto z = CycNum::zeta_pow(7, 1);
  CSeries s(CycNum::zero(7), 2, -1, 9);
  s.at(-1) = z;
  s.at(3) = CycNum(7, Rational(5, 3));
  auto text = serialize(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), "D=2 min=-1 prec=9");
  EXPECT_EQ(deserialize(text, CycNum::zero(7)), s);
  EXPECT_EQ(serialize(deserialize(text, CycNum::zero(7))), text);
  EXPECT_THROW(deserialize<Rational>("D=1 min=0 prec=3\n5: 1\n", Rational(0)), ParseError);

  auto r = poly({{0, 1}, {2, 1}}, 10);
  auto m = s * r;
  EXPECT_EQ(m.coeff_at(Rational(-1, 2)), z);
  EXPECT_EQ(m.coeff_at(Rational(3, 2)), z + CycNum(7, Rational(5, 3)));
  auto inv = qs_inv(s);
  auto one = s * inv;
  EXPECT_EQ(one.coeff_at(0), CycNum::one(7));
  for (long n = 1; n < one.prec(); ++n) EXPECT_TRUE(one.at(n).is_zero());
}

TEST(QSeries, Evaluation) {
  std::complex<double> tau(0, 1);
  auto eta = eta_series(1, 40);
  EXPECT_NEAR(eval_at(eta, tau).real(), 0.768225422326056659, 1e-10);
  EXPECT_LT(eval_tail_bound(eta, tau), 1e-10);
  EXPECT_NEAR(std::abs(eval_at(RSeries::constant(Rational(1), Rational(3), Rational(0)), {0.3, 0.7})), 1.0, 1e-15);
  EXPECT_THROW(eval_at(eta, {0.0, -1.0}), DomainError);
}

TEST(QSeries, EtaQuotientMatchesFactorProducts) {
  Rational prec(300);
  auto fast = eta_quotient({{196, 0, 2}, {196, 7, -1}, {196, 42, 3}, {4, 1, -1}, {2, 0, 1}}, prec);
  auto slow = eta_series(196, prec) * eta_series(196, prec) * qs_inv(geta_f(196, 7, prec + 20)) *
              geta_f(196, 42, prec) * geta_f(196, 42, prec) * geta_f(196, 42, prec) *
              qs_inv(geta_f(4, 1, prec + 20)) * eta_series(2, prec);
  EXPECT_EQ(fast.min_exponent(), slow.min_exponent());
  EXPECT_EQ(fast.truncated(prec - 40), slow.truncated(prec - 40));
  EXPECT_EQ(eta_quotient_order({{4, 0, 1}, {1, 0, 1}, {2, 0, -1}}), Rational(1, 8));
}

TEST(QSeries, NegateVariable) {
  auto x = poly({{0, 1}, {1, 2}, {3, 5}, {4, 1}}, 6);
  EXPECT_EQ(qs_negate_variable(x), poly({{0, 1}, {1, -2}, {3, -5}, {4, 1}}, 6));
}
