#include <gtest/gtest.h>

#include "akit/bundle_map.hpp"
#include "akit/tangent_case.hpp"
#include "generators.hpp"

namespace akit {
namespace {

AlgebroidPtr so3_point() { return testgen::point_algebroid("so3", testgen::known_algebra("so3")); }

BundleMap constant_matrix_map(const AlgebroidPtr& g, const std::vector<std::vector<int>>& m) {
  PolyMatrix fiber;
  for (const auto& row : m) {
    std::vector<Polynomial> r;
    for (int x : row) r.push_back(g->constant(x));
    fiber.push_back(std::move(r));
  }
  return BundleMap(g, g, {}, std::move(fiber), "Phi");
}

// Φ = dφ for φ: ℝ → ℝ, φ(x) = x².
BundleMap square_map() {
  const AlgebroidPtr M = tangent_algebroid(1, "x");
  const AlgebroidPtr N = tangent_algebroid(1, "y");
  const Polynomial x = M->coordinate(0);
  return BundleMap(M, N, {x * x}, {{x * Rational(2)}}, "sq");
}

TEST(Pullback, IdentityFixesForms) {
  testgen::Rng rng(3);
  const AlgebroidPtr A = testgen::action_algebroid(testgen::so3());
  const BundleMap id = BundleMap::identity(A);
  for (int k = 0; k <= 3; ++k) {
    const AlgebroidForm w = testgen::random_form(rng, *A, k, 2, true);
    EXPECT_EQ(pullback(id, w), w);
  }
}

TEST(Pullback, ChainRuleOnTheLine) {
  const BundleMap F = square_map();
  const LieAlgebroid& N = *F.target();
  const AlgebroidForm w = N.coordinate(0) * N.covector(0);
  const LieAlgebroid& M = *F.source();
  EXPECT_EQ(pullback(F, w), parse_poly("2*x1^3", M.ring()) * M.covector(0));
}

TEST(Pullback, DegenerateMap) {
  const AlgebroidPtr M = tangent_algebroid(2, "x");
  const AlgebroidPtr N = tangent_algebroid(2, "y");
  const BundleMap F(M, N, {M->constant(3), M->constant(Rational(1, 2))},
                    PolyMatrix(2, std::vector<Polynomial>(2, M->zero())));
  EXPECT_TRUE(pullback(F, N->covector(1)).is_zero());
  EXPECT_EQ(pullback(F, N->function(N->coordinate(1))), M->function(M->constant(Rational(1, 2))));
}

TEST(IsMorphism, Examples) {
  EXPECT_TRUE(is_morphism(square_map()).passed());
  const AlgebroidPtr g = so3_point();
  EXPECT_TRUE(is_morphism(BundleMap::identity(g)).passed());
  const CheckReport bad = is_morphism(constant_matrix_map(g, {{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(bad.status, Status::fail);
  ASSERT_FALSE(bad.residuals.empty());
  EXPECT_NE(bad.residuals.front().label.find("eps^"), std::string::npos);
}

TEST(IsMorphism, TimeDependentIsCheckedForAllT) {
  const AlgebroidPtr T = tangent_algebroid(1, "x");
  const Polynomial x = T->coordinate(0);
  const Polynomial t = T->time();
  const BundleMap good(T, T, {t * x}, {{t}});
  const BundleMap bad(T, T, {t * x}, {{T->constant(1)}});
  const CheckReport r = is_morphism(good);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.notes.empty());
  EXPECT_FALSE(is_morphism(bad).passed());
}

TEST(Contraction, Examples) {
  const BundleMap F = square_map();
  const LieAlgebroid& M = *F.source();
  const LieAlgebroid& N = *F.target();
  const SupportedSection theta(F, {M.constant(1)});
  EXPECT_TRUE(contraction(theta, F, N.function(N.coordinate(0))).is_zero());
  EXPECT_EQ(contraction(theta, F, N.covector(0)).as_function(), M.constant(1));
  EXPECT_TRUE(contraction(theta, F, wedge(N.covector(0), N.covector(0))).is_zero());

  const AlgebroidPtr M2 = tangent_algebroid(2, "x");
  const AlgebroidPtr N2 = tangent_algebroid(2, "y");
  const Polynomial x = M2->coordinate(0);
  const BundleMap G(M2, N2, {x * x, x * x * x}, {{x * Rational(2), M2->zero()}, {M2->zero(), x * x * Rational(3)}});
  const SupportedSection th(G, {M2->constant(1), M2->zero()});
  const AlgebroidForm w = wedge(N2->covector(0), N2->covector(1));
  EXPECT_EQ(contraction(th, G, w), (x * x * Rational(3)) * M2->covector(1));
}

TEST(Contraction, MismatchedBaseMapRejected) {
  const BundleMap F = square_map();
  const SupportedSection other(std::vector<Polynomial>{F.source()->coordinate(0)}, {F.source()->constant(1)});
  EXPECT_THROW(contraction(other, F, F.target()->covector(0)), BundleMapError);
}

TEST(DerivationToSection, Basics) {
  const BundleMap F = square_map();
  const std::vector<Polynomial> zero{F.source()->zero()};
  const SupportedSection s = derivation_to_section(zero, F);
  EXPECT_TRUE(s[0].is_zero());
  const std::vector<Polynomial> delta{F.source()->constant(1)};
  EXPECT_EQ(derivation_to_section(delta, F)[0], F.source()->constant(1));
}

class BundleMapProperties : public ::testing::TestWithParam<int> {};

TEST_P(BundleMapProperties, PullbackIsMultiplicativeAndContractionIsDerivation) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 6; ++trial) {
    const AlgebroidPtr M = testgen::random_algebroid(rng);
    const AlgebroidPtr N = testgen::random_algebroid(rng);
    const BundleMap F = testgen::random_bundle_map(rng, M, N, 2, rng.coin());
    const SupportedSection theta(F, testgen::random_section(rng, *M, N->rank(), 2, true));
    const int p = rng.uniform(0, 2);
    const int q = rng.uniform(0, 2);
    const AlgebroidForm a = testgen::random_form(rng, *N, p, 2, false);
    const AlgebroidForm b = testgen::random_form(rng, *N, q, 2, false);
    EXPECT_EQ(pullback(F, wedge(a, b)), wedge(pullback(F, a), pullback(F, b)));

    // Contraction kills functions, so the corresponding term drops out.
    const AlgebroidForm lhs = contraction(theta, F, wedge(a, b));
    if (p + q == 0) {
      EXPECT_TRUE(lhs.is_zero());
      continue;
    }
    AlgebroidForm rhs(M->ring(), M->rank(), p + q - 1);
    if (p > 0) rhs += wedge(contraction(theta, F, a), pullback(F, b));
    if (q > 0) {
      const AlgebroidForm second = wedge(pullback(F, a), contraction(theta, F, b));
      rhs += p % 2 == 0 ? second : -second;
    }
    EXPECT_EQ(lhs, rhs);
  }
}

TEST_P(BundleMapProperties, DerivationSectionRoundTrip) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()) + 11);
  for (int trial = 0; trial < 6; ++trial) {
    const AlgebroidPtr M = testgen::random_algebroid(rng);
    const AlgebroidPtr N = testgen::random_algebroid(rng);
    const BundleMap F = testgen::random_bundle_map(rng, M, N, 2, rng.coin());
    const SupportedSection theta(F, testgen::random_section(rng, *M, N->rank(), 2, true));
    std::vector<Polynomial> values;
    for (int b = 0; b < N->rank(); ++b) values.push_back(contraction(theta, F, N->covector(b)).as_function());
    EXPECT_EQ(derivation_to_section(values, F), theta);
  }
}

TEST_P(BundleMapProperties, PullbackIsFunctorial) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()) + 23);
  for (int trial = 0; trial < 5; ++trial) {
    const AlgebroidPtr M = testgen::random_algebroid(rng);
    const AlgebroidPtr N = testgen::random_algebroid(rng);
    const AlgebroidPtr P = testgen::random_algebroid(rng);
    const BundleMap G = testgen::random_bundle_map(rng, M, N, 2, false);
    const BundleMap F = testgen::random_bundle_map(rng, N, P, 2, false);
    const AlgebroidForm w = testgen::random_form(rng, *P, rng.uniform(0, 2), 2, false);
    EXPECT_EQ(pullback(compose(F, G), w), pullback(G, pullback(F, w)));
  }
}

// Generator-only morphism check against the full-form identity Φ*d w = d Φ*w.
TEST_P(BundleMapProperties, GeneratorCheckAgreesWithFullForms) {
  testgen::Rng rng(static_cast<std::uint64_t>(GetParam()) + 37);
  for (int trial = 0; trial < 6; ++trial) {
    const bool use_tangent = rng.coin();
    NaturalHomotopy H = use_tangent ? testgen::random_tangent_homotopy(rng, 2, 2, 2) : testgen::random_lie_homotopy(rng);
    // A genuine morphism, and a perturbed copy that is usually not one.
    const BundleMap good = H.pieces().front().family.at_time(Rational(1, 3));
    PolyMatrix fiber = good.fiber();
    fiber[0][0] += good.source()->constant(1);
    const BundleMap perturbed(good.source(), good.target(), good.base_map(), fiber);
    for (const BundleMap* F : {&good, &perturbed}) {
      const LieAlgebroid& M = *F->source();
      const LieAlgebroid& N = *F->target();
      bool all_forms_commute = true;
      for (int k = 0; k <= 1; ++k) {
        for (int rep = 0; rep < 3; ++rep) {
          const AlgebroidForm w = testgen::random_form(rng, N, k, 2, false);
          all_forms_commute &= pullback(*F, differential(N, w)) == differential(M, pullback(*F, w));
        }
        // Generators themselves, so that a failure cannot be missed by sampling.
        std::vector<AlgebroidForm> generators;
        if (k == 0) {
          for (int j = 0; j < N.base_dim(); ++j) generators.push_back(N.function(N.coordinate(j)));
        } else {
          for (int b = 0; b < N.rank(); ++b) generators.push_back(N.covector(b));
        }
        for (const auto& g : generators) {
          all_forms_commute &= pullback(*F, differential(N, g)) == differential(M, pullback(*F, g));
        }
      }
      EXPECT_EQ(is_morphism(*F).passed(), all_forms_commute);
    }
    EXPECT_TRUE(is_morphism(good).passed());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, BundleMapProperties, ::testing::Range(1, 6));

}  // namespace
}  // namespace akit
