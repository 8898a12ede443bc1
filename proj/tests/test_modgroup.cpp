#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mockdissect/modgroup.hpp"
#include "mockdissect/qseries.hpp"
#include "table1.hpp"

using namespace mockdissect;

namespace {

const GroupSpec kG{196, 28};

// Brute-force width: least w with B T^w B^-1 in G, by direct matrix products.
long brute_width(const Cusp& c, const GroupSpec& G) {
  UniMatrix B = matrix_to_cusp(c);
  UniMatrix Binv{B.d, -B.b, -B.c, B.a};
  for (long w = 1;; ++w)
    if (member(B * UniMatrix{1, w, 0, 1} * Binv, G)) return w;
}

UniMatrix random_sl2(std::mt19937& rng, long lo_c, long hi_c) {
  std::uniform_int_distribution<long> dc(lo_c, hi_c), dd(-7, 7);
  for (;;) {
    long c = dc(rng), d = dd(rng);
    if (gcd_l(c, d) != 1) continue;
    auto [g, x, y] = ext_gcd(d, c);  // d x + c y = 1 -> a = x, b = -y
    (void)g;
    return {x, -y, c, d};
  }
}

}  // namespace

TEST(ModGroup, Membership) {
  EXPECT_TRUE(member({1, 1, 0, 1}, kG));
  EXPECT_FALSE(member({1, 0, 28, 1}, kG));
  EXPECT_FALSE(member({-1, 0, 0, -1}, kG));
  EXPECT_TRUE(member({29, 25, 196, 169}, kG));
  EXPECT_FALSE(member({13, 12, 196, 181}, kG));
  EXPECT_TRUE(member({13, 12, 196, 181}, GroupSpec{196, 1}));
  EXPECT_THROW(member({2, 0, 0, 1}, kG), DomainError);
}

TEST(ModGroup, MatrixToCusp) {
  auto I = matrix_to_cusp(Cusp::infinity());
  EXPECT_EQ((std::array{I.a, I.b, I.c, I.d}), (std::array{1L, 0L, 0L, 1L}));
  auto S = matrix_to_cusp(Cusp(0, 1));
  EXPECT_EQ((std::array{S.a, S.c, S.det()}), (std::array{0L, 1L, 1L}));
  auto B = matrix_to_cusp(Cusp(3, 80));
  EXPECT_EQ(B.a, 3);
  EXPECT_EQ(B.c, 80);
  EXPECT_EQ(B.det(), 1);
}

TEST(ModGroup, WidthsClosedFormMatchesSearch) {
  EXPECT_EQ(width(Cusp(0, 1), kG), 196);
  EXPECT_EQ(width(Cusp::infinity(), kG), 1);
  EXPECT_EQ(width(Cusp(3, 80), kG), 49);
  for (long den = 1; den <= 60; ++den)
    for (long num = -3; num <= den; ++num)
      if (gcd_l(num, den) == 1) EXPECT_EQ(width(Cusp(num, den), kG), brute_width(Cusp(num, den), kG));
}

TEST(ModGroup, SmallGroups) {
  auto full = cusp_set({1, 1});
  ASSERT_EQ(full.size(), 1u);
  EXPECT_TRUE(full[0].first.is_infinity());
  EXPECT_EQ(full[0].second, 1);
  EXPECT_EQ(group_index({1, 1}), 1);
  EXPECT_TRUE(cusp_equiv(Cusp(0, 1), Cusp::infinity(), {1, 1}));
  EXPECT_EQ(group_index({4, 1}), 6);
  // Gamma0(4): cusps inf, 0, 1/2 with widths 1, 4, 1
  auto g4 = cusp_set({4, 1});
  ASSERT_EQ(g4.size(), 3u);
  long sum = 0;
  for (auto& [c, w] : g4) sum += w;
  EXPECT_EQ(sum, 6);
  EXPECT_EQ(group_index({1, 5}), 24);  // Gamma1(5): index 24, four cusps
  EXPECT_EQ(cusp_set({1, 5}).size(), 4u);
  // Gamma0(p) index p + 1
  EXPECT_EQ(group_index({7, 1}), 8);
  EXPECT_EQ(group_index({12, 1}), 24);
}

TEST(ModGroup, TargetGroupCounts) {
  auto s = CuspStructure::get(kG);
  EXPECT_EQ(s->image_size(), 1372);
  EXPECT_EQ(group_index(kG), 4032);
  EXPECT_FALSE(s->contains_minus_identity());
  auto cs = cusp_set(kG);
  EXPECT_EQ(cs.size(), 120u);
  long sum = 0;
  for (auto& [c, w] : cs) sum += w;
  EXPECT_EQ(sum, group_index(kG) / 2);
  EXPECT_FALSE(cusp_equiv(Cusp(0, 1), Cusp::infinity(), kG));
}

TEST(ModGroup, Table1Bijection) {
  auto cs = cusp_set(kG);
  std::set<long> hit;
  for (const auto& row : kTable1) {
    Cusp c(row[0], row[1]);
    long id = CuspStructure::get(kG)->class_of(c);
    EXPECT_TRUE(hit.insert(id).second) << c.to_string() << " shares a class with another entry";
    EXPECT_EQ(cs[static_cast<size_t>(id)].second, row[2]) << c.to_string();
    EXPECT_EQ(width(c, kG), row[2]) << c.to_string();
  }
  EXPECT_EQ(hit.size(), 120u);
}

TEST(ModGroup, EquivalenceProperties) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> dden(1, 400), dnum(-400, 400);
  auto rnd = [&] {
    for (;;) {
      long a = dnum(rng), c = dden(rng);
      if (gcd_l(a, c) == 1) return Cusp(a, c);
    }
  };
  for (int t = 0; t < 300; ++t) {
    Cusp x = rnd(), y = rnd(), z = rnd();
    EXPECT_TRUE(cusp_equiv(x, x, kG));
    EXPECT_EQ(cusp_equiv(x, y, kG), cusp_equiv(y, x, kG));
    if (cusp_equiv(x, y, kG) && cusp_equiv(y, z, kG)) EXPECT_TRUE(cusp_equiv(x, z, kG));
    if (cusp_equiv(x, y, kG)) EXPECT_EQ(width(x, kG), width(y, kG));
    // h(x) ~ x for h a word in known group elements
    UniMatrix h{1, 0, 0, 1};
    for (int k = 0; k < 3; ++k) h = h * (t % (k + 2) ? UniMatrix{29, 25, 196, 169} : UniMatrix{1, t % 7 - 3, 0, 1});
    ASSERT_TRUE(member(h, kG));
    EXPECT_TRUE(cusp_equiv(Cusp(h.a * x.num + h.b * x.den, h.c * x.num + h.d * x.den), x, kG));
  }
}

TEST(EtaMultiplier, ClosedValues) {
  EXPECT_EQ(eta_multiplier({1, 1, 0, 1}), CycNum::zeta_pow(24, 1));
  EXPECT_EQ(eta_multiplier({0, -1, 1, 0}), CycNum::zeta_pow(24, -3));
  EXPECT_EQ(jacobi(2, 7), 1);
  EXPECT_EQ(jacobi(3, 7), -1);
  EXPECT_EQ(jacobi_ext(-1, -1), -1);
  EXPECT_EQ(jacobi_ext(0, -1), 1);
}

TEST(EtaMultiplier, NumericTransformation) {
  std::mt19937 rng(5);
  const std::complex<double> tau(0, 2);
  for (int t = 0; t < 40; ++t) {
    UniMatrix B = random_sl2(rng, t % 2 ? 1 : -3, 4);
    if (B.c == 0) continue;
    auto nu = eta_multiplier(B);
    auto nu24 = nu;
    for (int i = 1; i < 24; ++i) nu24 = nu24 * nu;
    EXPECT_EQ(nu24, CycNum::one(24));
    std::complex<double> g(static_cast<double>(B.c), 0), d(static_cast<double>(B.d), 0);
    std::complex<double> Btau = (static_cast<double>(B.a) * tau + static_cast<double>(B.b)) / (g * tau + d);
    long prec = 10;
    while (std::pow(std::exp(-2 * M_PI * Btau.imag()), prec) / (1 - std::exp(-2 * M_PI * Btau.imag())) > 1e-12)
      prec *= 2;
    auto lhs = eval_at(eta_series(1, prec), Btau);
    auto rhs = nu.to_complex() * std::sqrt(g * tau + d) * eval_at(eta_series(1, 40), tau);
    if (B.c > 0) EXPECT_LT(std::abs(lhs - rhs), 1e-8) << B.a << " " << B.b << " " << B.c << " " << B.d;
    if (B.c < 0) {
      // -B acts identically on H; record how the formula behaves on the other sign
      auto rhs_neg = eta_multiplier({-B.a, -B.b, -B.c, -B.d}).to_complex() * std::sqrt(-g * tau - d) *
                     eval_at(eta_series(1, 40), tau);
      EXPECT_LT(std::abs(lhs - rhs_neg), 1e-8);
    }
  }
}
