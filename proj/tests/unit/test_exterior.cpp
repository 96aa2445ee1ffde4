#include <gtest/gtest.h>

#include "akit/exterior.hpp"
#include "generators.hpp"

namespace akit {
namespace {

const Ring kRing({"x1", "x2", "t"});

AlgebroidForm e(std::vector<int> idx, int rank = 3, const char* coeff = "1") {
  return AlgebroidForm::basis(parse_poly(coeff, kRing), rank, std::move(idx));
}

std::vector<Polynomial> direction(std::initializer_list<int> v) {
  std::vector<Polynomial> out;
  for (int x : v) out.push_back(Polynomial::constant(kRing, x));
  return out;
}

TEST(Wedge, Antisymmetry) {
  EXPECT_TRUE(wedge(e({0}), e({0})).is_zero());
  EXPECT_EQ(wedge(e({1}), e({0})), -e({0, 1}));
  EXPECT_EQ(wedge(e({0}, 3, "x1"), e({1, 2})), e({0, 1, 2}, 3, "x1"));
}

TEST(Wedge, BasisSortsWithSign) {
  EXPECT_EQ(e({2, 0}), -e({0, 2}));
  EXPECT_TRUE(e({1, 1}).is_zero());
  EXPECT_EQ(e({0, 2}).to_string(), "e^1^e^3");
}

TEST(Wedge, DegreeAboveRankIsZero) {
  const AlgebroidForm w(kRing, 2, 3);
  EXPECT_TRUE(w.is_zero());
  EXPECT_TRUE(wedge(e({0, 1}, 2), e({0}, 2)).is_zero());
}

TEST(ContractFirst, SlotSigns) {
  EXPECT_EQ(contract_first(e({0, 1}), direction({1, 0, 0})), e({1}));
  EXPECT_EQ(contract_first(e({0, 1}), direction({0, 1, 0})), -e({0}));
  EXPECT_EQ(contract_first(e({0, 1, 2}, 3, "x1"), direction({0, 1, 0})), -e({0, 2}, 3, "x1"));
}

TEST(Form, RenderingParenthesizesSums) {
  // Mixed degrees are rejected.
  EXPECT_THROW(e({0}) + e({0, 1}), FormError);
  const AlgebroidForm one = e({0}, 3, "x1 + 1") + e({2}, 3, "-1/2");
  EXPECT_EQ(one.to_string(), "(x1 + 1)*e^1 + -1/2*e^3");
}

TEST(Form, RankMismatchRejected) { EXPECT_THROW(e({0}, 2) + e({0}, 3), FormError); }

class ExteriorProperties : public ::testing::TestWithParam<int> {};

AlgebroidForm random_form(testgen::Rng& rng, int rank, int degree) {
  AlgebroidForm w(kRing, rank, degree);
  if (degree > rank) return w;
  for (int k = 0; k < 4; ++k) {
    std::vector<int> idx;
    for (int i = 0; i < degree; ++i) idx.push_back(rng.uniform(0, rank - 1));
    w += AlgebroidForm::basis(testgen::random_poly(rng, kRing, {"x1", "x2", "t"}, 2, 3), rank, idx);
  }
  return w;
}

TEST_P(ExteriorProperties, GradedCommutativityDerivationAndNilpotence) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 15; ++trial) {
    const int rank = rng.uniform(1, 5);
    const int p = rng.uniform(0, 3);
    const int q = rng.uniform(0, 3);
    const AlgebroidForm a = random_form(rng, rank, p);
    const AlgebroidForm b = random_form(rng, rank, q);
    const AlgebroidForm ab = wedge(a, b);
    const AlgebroidForm ba = wedge(b, a);
    EXPECT_EQ(ab, (p * q) % 2 == 0 ? ba : -ba);

    std::vector<Polynomial> v;
    for (int i = 0; i < rank; ++i) v.push_back(testgen::random_poly(rng, kRing, {"x1", "t"}, 1, 2));
    if (p > 0 && q > 0) {
      AlgebroidForm rhs = wedge(contract_first(a, v), b);
      const AlgebroidForm second = wedge(a, contract_first(b, v));
      rhs += p % 2 == 0 ? second : -second;
      EXPECT_EQ(contract_first(ab, v), rhs);
    }
    if (p >= 2) {
      EXPECT_TRUE(contract_first(contract_first(a, v), v).is_zero());
    }
  }
}

TEST_P(ExteriorProperties, WedgeIsAssociative) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()) + 100);
  for (int trial = 0; trial < 10; ++trial) {
    const int rank = rng.uniform(2, 5);
    const AlgebroidForm a = random_form(rng, rank, rng.uniform(0, 2));
    const AlgebroidForm b = random_form(rng, rank, rng.uniform(0, 2));
    const AlgebroidForm c = random_form(rng, rank, rng.uniform(0, 2));
    EXPECT_EQ(wedge(wedge(a, b), c), wedge(a, wedge(b, c)));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ExteriorProperties, ::testing::Range(1, 6));

}  // namespace
}  // namespace akit
