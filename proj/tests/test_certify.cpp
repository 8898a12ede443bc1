#include <gtest/gtest.h>

#include "mockdissect/certify.hpp"

using namespace mockdissect;

namespace {

const GroupSpec kG{196, 28};

const Identity& c7() {
  static const Identity id = load_identity(std::string(MOCKDISSECT_DATA_DIR) + "/c7.json");
  return id;
}

// Index of the first J term of residue d other than `skip`.
long first_j(const Identity& id, long d, long skip = -1) {
  for (long i = 0; i < static_cast<long>(id.residues[d].size()); ++i)
    if (id.residues[d][i].kind == IdentityTerm::Kind::J && i != skip) return i;
  return -1;
}

}  // namespace

TEST(Certify, RequiredOrder) {
  EXPECT_EQ(required_order(Rational(-522)), 523);
  EXPECT_EQ(required_order(Rational(-1045, 2)), 523);
  EXPECT_EQ(required_order(Rational(-1, 2)), 1);
  EXPECT_EQ(required_order(Rational(0)), 1);
  EXPECT_EQ(required_order(Rational(7)), 1);
}

TEST(Certify, TermRefs) {
  EXPECT_EQ(TermRef::parse("3:17").to_string(), "3:17");
  EXPECT_THROW(TermRef::parse("3-17"), ParseError);
  EXPECT_THROW(g1_factors(c7(), {0, 0}), DomainError);  // an S term
  EXPECT_THROW(term_at(c7(), {9, 0}), DomainError);
  EXPECT_EQ(default_g1(c7()).to_string(), "0:2");
}

TEST(Certify, STermsMatchCombination) {
  EXPECT_NO_THROW(check_s_terms(c7()));
  Identity bad = c7();
  bad.residues[0][0].A[0] += 1;
  EXPECT_THROW(check_s_terms(bad), DomainError);
}

TEST(Certify, LiteralAndModularDifferencesAgreeAndVanish) {
  CSeries lit = build_difference_literal(c7(), 150, 4);
  CSeries mod = build_difference(c7(), 150, 4);
  EXPECT_EQ(lit.prec(), 150);
  EXPECT_TRUE(lit.is_zero_to_precision());
  EXPECT_TRUE(mod.is_zero_to_precision());
  EXPECT_EQ(mod.prec() / mod.denom(), 150);
}

TEST(Certify, BoundsWithDefaultG1) {
  auto s = search_g1(c7(), kG, 4);
  ASSERT_FALSE(s.empty());
  const TermRef def = default_g1(c7());
  auto it = std::find_if(s.begin(), s.end(), [&](const auto& x) { return x.first.d == def.d && x.first.index == def.index; });
  ASSERT_NE(it, s.end());
  EXPECT_EQ(it->second, Rational(-522));
  EXPECT_GE(s.front().second, Rational(-540));
  for (size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1].second, s[i].second);
  // every row of the bound table comes from the 119 cusps other than infinity
  auto diff = difference_bounds(c7(), kG);
  EXPECT_EQ(diff.size(), 119u);
  long widths = 0;
  for (const auto& [cw, b] : diff) widths += cw.second;
  EXPECT_EQ(widths, 2016 - 1);
}

TEST(Certify, CorruptedCoefficientFails) {
  Identity bad = c7();
  long i = first_j(bad, 3);
  bad.residues[3][i].A[1] += 1;
  // keep the precision cap small so only the witness search runs far enough
  Certificate c = valence_certificate(bad, kG, default_g1(bad), 600, 4);
  EXPECT_FALSE(c.pass);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_LE(c.witness->first, Rational(c.required_order));
}

TEST(Certify, CorruptedExponentFailsWithWitness) {
  Identity bad = c7();
  long i = first_j(bad, 2);
  auto& num = bad.residues[2][static_cast<size_t>(i)].num;
  auto f = std::find_if(num.begin(), num.end(), [](const JFactor& x) { return x.a != 0; });
  ASSERT_NE(f, num.end());
  f->e += 1;
  EXPECT_THROW(build_difference(bad, 20), DomainError);
  Certificate c = valence_certificate(bad, kG, default_g1(bad), 600, 2);
  EXPECT_FALSE(c.pass);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_LE(c.witness->first, Rational(c.verified_through));
  EXPECT_LT(c.witness->first, Rational(64));
  EXPECT_NE(c.note.find("not modular"), std::string::npos);
}

TEST(Certify, PrecisionCapBelowRequiredOrder) {
  EXPECT_THROW(valence_certificate(c7(), kG, default_g1(c7()), 100, 1), DomainError);
}

TEST(Certify, JsonShape) {
  Certificate c;
  c.g1 = {0, 2};
  c.rows.push_back({Cusp(0, 1), 196, {Rational(-1, 3), false}, Rational(-196, 3)});
  c.total_noninf = Rational(-196, 3);
  c.required_order = required_order(c.total_noninf);
  c.witness = std::make_pair(Rational(5), std::string("[1] @ zeta_28"));
  auto j = certificate_json(c);
  EXPECT_EQ(j["rows"][0]["ORD"], "-196/3");
  EXPECT_EQ(j["required_order"], 66);
  EXPECT_EQ(j["verdict"]["status"], "FAIL");
  EXPECT_EQ(j["verdict"]["first_nonzero"]["exponent"], "5");
  EXPECT_EQ(certificate_json(c).dump(), j.dump());
}

TEST(RankDifferences, AgreeWithOracles) {
  auto reps = check_rank_differences(c7(), {1, 2, 3}, {0, 1, 2, 3, 4, 5, 6}, 20, 80, 4);
  ASSERT_EQ(reps.size(), 21u);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.ok()) << r.r << "," << r.d << " first disagreement " << r.first_disagreement.value_or(-1);
    EXPECT_EQ(r.checked_through, 19);
    EXPECT_GE(r.enumerated_through, 10);
  }
}

TEST(RankDifferences, LeadingCoefficientsOfResidueZero) {
  // R2_{1,0,7}(0; q) starts with N2(1,7,0) - N2(0,7,0) = -1, then the n = 7 and n = 14 counts
  RSeries s = rank_diff_from_identity(c7(), 1, 0, Rational(3));
  for (long n = 0; n < 3; ++n) {
    BigInt want = n2_mod(1, 7, static_cast<int>(7 * n)) - n2_mod(0, 7, static_cast<int>(7 * n));
    EXPECT_EQ(s.coeff_at(Rational(n)), Rational(want)) << n;
  }
  EXPECT_EQ(s.coeff_at(Rational(0)), Rational(-1));
}

TEST(RankDifferences, DetectsCorruption) {
  Identity bad = c7();
  bad.residues[5][static_cast<size_t>(first_j(bad, 5))].A[0] += 1;
  auto reps = check_rank_differences(bad, {1}, {5}, 10, 80);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_FALSE(reps[0].ok());
}

TEST(Certify, FullCertificatePassesAndIsDeterministic) {
  Certificate one = valence_certificate(c7(), kG, default_g1(c7()), 4000, 1);
  EXPECT_TRUE(one.pass);
  EXPECT_EQ(one.total_noninf, Rational(-522));
  EXPECT_EQ(one.required_order, 523);
  EXPECT_GE(one.verified_through, 523);
  EXPECT_EQ(one.rows.size(), 119u);
  Certificate four = valence_certificate(c7(), kG, default_g1(c7()), 4000, 4);
  EXPECT_EQ(certificate_json(one).dump(), certificate_json(four).dump());
}
