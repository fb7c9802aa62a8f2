#include "kappanu/symmetry.hpp"

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kappanu/classify.hpp"
#include "kappanu/feedback.hpp"

namespace k = kappanu;

namespace {

k::Chart xyw() { return k::Chart({"x", "y", "w"}); }

k::Expr var(const char* n) { return k::variable(n); }

k::ControlSystem elliptic() {
  k::Chart c = xyw();
  k::VectorField f(c, {k::cos(var("w")), k::sin(var("w")), k::integer(0)});
  k::VectorField g(c, {k::integer(0), k::integer(0), k::integer(1)});
  return k::ControlSystem(c, f, {g}, {0.0, 0.0, 0.0});
}

// x' = (w+1)^p ordered by the exponent list; w' = u.  Base point at the
// origin keeps w + 1 positive on the sample box.
k::ControlSystem power_profile(const std::vector<int>& exponents) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    names.push_back("x" + std::to_string(i + 1));
  }
  names.push_back("w");
  k::Chart c(names);
  k::Expr shifted = k::add(var("w"), k::integer(1));
  std::vector<k::Expr> f_comps;
  for (int p : exponents) {
    f_comps.push_back(k::pow(shifted, k::integer(p)));
  }
  f_comps.push_back(k::integer(0));
  std::vector<k::Expr> g_comps(names.size(), k::integer(0));
  g_comps.back() = k::integer(1);
  return k::ControlSystem(c, k::VectorField(c, f_comps),
                          {k::VectorField(c, g_comps)},
                          std::vector<double>(names.size(), 0.0));
}

k::VectorField unit_field(const k::Chart& c, std::size_t i) {
  std::vector<k::Expr> comps(c.dim(), k::integer(0));
  comps[i] = k::integer(1);
  return k::VectorField(c, comps);
}

// Scaling generator sum_i a_i x_i d/dx_i + (w+1) d/dw.
k::VectorField scaling_field(const k::Chart& c, const std::vector<int>& a) {
  std::vector<k::Expr> comps;
  for (std::size_t i = 0; i < a.size(); ++i) {
    comps.push_back(
        k::mul(k::integer(a[i]), var(c.name(i).c_str())));
  }
  comps.push_back(k::add(var("w"), k::integer(1)));
  return k::VectorField(c, comps);
}

}  // namespace

TEST(Symmetry, TranslationsPreserveProfileSystems) {
  k::SamplePlan plan;
  auto sys = elliptic();
  for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
    auto check = k::is_infinitesimal_symmetry(
        sys, {unit_field(sys.chart(), i), "d/dx"}, plan);
    ASSERT_TRUE(check.applicable);
    EXPECT_TRUE(check.yes());
    EXPECT_TRUE(check.failures.empty());
  }
}

TEST(Symmetry, ScalingBreaksTheEllipticDrift) {
  k::SamplePlan plan;
  auto sys = elliptic();
  k::VectorField v(sys.chart(),
                   {var("x"), k::integer(0), k::integer(0)});
  auto check = k::is_infinitesimal_symmetry(sys, {v, "x d/dx"}, plan);
  ASSERT_TRUE(check.applicable);
  EXPECT_TRUE(check.no());
  ASSERT_EQ(check.failures.size(), 1u);
  EXPECT_EQ(check.failures[0], "[v,f]");
}

TEST(Symmetry, RotationPlusShiftPreservesElliptic) {
  // v = -y d/dx + x d/dy + d/dw generates simultaneous rotation of the
  // plane and phase shift; the drift is equivariant under it.
  k::SamplePlan plan;
  auto sys = elliptic();
  k::VectorField rot(sys.chart(),
                     {k::neg(var("y")), var("x"), k::integer(1)});
  auto check = k::is_infinitesimal_symmetry(sys, {rot, "rot"}, plan);
  EXPECT_TRUE(check.yes());
}

TEST(Symmetry, BracketOfSymmetriesIsAgainASymmetry) {
  k::SamplePlan plan;
  auto sys = elliptic();
  k::VectorField a = unit_field(sys.chart(), 0);
  k::VectorField rot(sys.chart(),
                     {k::neg(var("y")), var("x"), k::integer(1)});
  ASSERT_TRUE(k::is_infinitesimal_symmetry(sys, {a, "a"}, plan).yes());
  ASSERT_TRUE(k::is_infinitesimal_symmetry(sys, {rot, "b"}, plan).yes());
  k::VectorField br = k::lie_bracket(a, rot);
  EXPECT_TRUE(k::is_infinitesimal_symmetry(sys, {br, "[a,b]"}, plan).yes());
}

TEST(Symmetry, ScalingGeneratorPreservesPowerProfiles) {
  k::SamplePlan plan;
  auto sys = power_profile({1, -1});
  auto v0 = scaling_field(sys.chart(), {1, -1});
  auto check = k::is_infinitesimal_symmetry(sys, {v0, "v0"}, plan);
  EXPECT_TRUE(check.yes());
  for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
    EXPECT_TRUE(k::is_infinitesimal_symmetry(
                    sys, {unit_field(sys.chart(), i), "vi"}, plan)
                    .yes());
  }
}

TEST(Symmetry, VerdictSurvivesFeedback) {
  k::SamplePlan plan;
  auto sys = elliptic();
  k::FeedbackTransform t{var("w"),
                         k::add(k::integer(2),
                                k::mul(k::rational(1, 4),
                                       k::mul(var("x"), var("x"))))};
  auto dressed = k::apply_feedback(sys, t, plan);
  ASSERT_TRUE(dressed.ok());
  k::VectorField good = unit_field(sys.chart(), 0);
  k::VectorField bad(sys.chart(),
                     {var("x"), k::integer(0), k::integer(0)});
  EXPECT_TRUE(
      k::is_infinitesimal_symmetry(*dressed.system, {good, "v"}, plan).yes());
  EXPECT_TRUE(
      k::is_infinitesimal_symmetry(*dressed.system, {bad, "v"}, plan).no());
}

TEST(Symmetry, DegenerateInputSpanIsRefused) {
  k::SamplePlan plan;
  k::Chart c = xyw();
  k::VectorField f(c, {k::integer(1), k::integer(0), k::integer(0)});
  k::VectorField g1 = unit_field(c, 2);
  k::VectorField g2 = k::vf_scale(var("w"), g1);
  k::ControlSystem sys(c, f, {g1, g2}, {0.0, 0.0, 0.3});
  auto check =
      k::is_infinitesimal_symmetry(sys, {unit_field(c, 0), "v"}, plan);
  EXPECT_FALSE(check.applicable);
  EXPECT_EQ(check.verdict, k::Verdict::kInconclusive);
}

TEST(Symmetry, ChartMismatchThrows) {
  k::SamplePlan plan;
  auto sys = elliptic();
  k::Chart other({"a", "b", "c"});
  EXPECT_THROW(k::is_infinitesimal_symmetry(
                   sys, {unit_field(other, 0), "v"}, plan),
               std::invalid_argument);
}

TEST(AbelianTrivialisation, TranslationsStraightenElliptic) {
  k::SamplePlan plan;
  auto sys = elliptic();
  std::vector<k::SymmetryCandidate> cands = {
      {unit_field(sys.chart(), 0), "v1"},
      {unit_field(sys.chart(), 1), "v2"}};
  auto rep = k::check_abelian_trivialisation(sys, cands, plan);
  ASSERT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.yes());
  EXPECT_EQ(rep.involutive, k::Verdict::kTrue);
  EXPECT_TRUE(rep.commuting.ok());
  ASSERT_TRUE(rep.base_point_rank.has_value());
  EXPECT_EQ(*rep.base_point_rank, 3);
  EXPECT_TRUE(rep.transversal);
}

TEST(AbelianTrivialisation, NonTransversalSetIsRejected) {
  k::SamplePlan plan;
  auto sys = elliptic();
  std::vector<k::SymmetryCandidate> cands = {
      {unit_field(sys.chart(), 0), "v1"},
      {unit_field(sys.chart(), 2), "v2"}};  // parallel to g
  auto rep = k::check_abelian_trivialisation(sys, cands, plan);
  ASSERT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.no());
  EXPECT_FALSE(rep.transversal);
  ASSERT_TRUE(rep.base_point_rank.has_value());
  EXPECT_EQ(*rep.base_point_rank, 2);
}

TEST(AbelianTrivialisation, WrongCandidateCountThrows) {
  k::SamplePlan plan;
  auto sys = elliptic();
  std::vector<k::SymmetryCandidate> one = {
      {unit_field(sys.chart(), 0), "v1"}};
  EXPECT_THROW(k::check_abelian_trivialisation(sys, one, plan),
               std::invalid_argument);
}

TEST(AbelianTrivialisation, CertificateImpliesTrivialisable) {
  k::SamplePlan plan;
  for (const auto& sys : {elliptic(), power_profile({1, -1})}) {
    std::vector<k::SymmetryCandidate> cands = {
        {unit_field(sys.chart(), 0), "v1"},
        {unit_field(sys.chart(), 1), "v2"}};
    auto cert = k::check_abelian_trivialisation(sys, cands, plan);
    ASSERT_TRUE(cert.yes());
    auto triv = k::check_trivialisable(sys, plan);
    ASSERT_TRUE(triv.applicable);
    EXPECT_TRUE(triv.yes());
  }
}

TEST(RankCondition, MonomialPairIsTrivialisable) {
  k::SamplePlan plan;
  k::Chart c({"x1", "x2", "w"});
  std::vector<k::Expr> h = {var("w"), k::mul(var("w"), var("w"))};
  auto rep = k::check_rank_condition_sigmaT(h, c, {0.0, 0.0, 0.3}, plan);
  ASSERT_TRUE(rep.applicable);
  EXPECT_EQ(rep.m, 1);
  EXPECT_EQ(rep.k, 1);
  EXPECT_EQ(rep.differential_rank.rank, 1);
  EXPECT_TRUE(rep.yes());
  EXPECT_TRUE(rep.equivalent_form_agrees);
}

TEST(RankCondition, StateDependenceBlocksTrivialisation) {
  k::SamplePlan plan;
  k::Chart c({"x1", "x2", "w"});
  std::vector<k::Expr> h = {var("w"), var("x1")};
  auto rep = k::check_rank_condition_sigmaT(h, c, {0.0, 0.0, 0.3}, plan);
  ASSERT_TRUE(rep.applicable);
  EXPECT_EQ(rep.k, 1);
  EXPECT_EQ(rep.differential_rank.rank, 2);
  EXPECT_TRUE(rep.no());
  EXPECT_FALSE(rep.equivalent_form_agrees);
}

TEST(RankCondition, TwoInputsSingleEffectiveControl) {
  k::SamplePlan plan;
  k::Chart c({"x1", "x2", "w1", "w2"});
  std::vector<k::Expr> h = {var("w1"), k::sin(var("w1"))};
  auto rep =
      k::check_rank_condition_sigmaT(h, c, {0.0, 0.0, 0.3, -0.2}, plan);
  ASSERT_TRUE(rep.applicable);
  EXPECT_EQ(rep.m, 2);
  EXPECT_EQ(rep.extended_span_rank.rank, 3);
  EXPECT_EQ(rep.k, 1);
  EXPECT_TRUE(rep.yes());
  EXPECT_TRUE(rep.equivalent_form_agrees);
}

TEST(RankCondition, BadShapeThrows) {
  k::SamplePlan plan;
  k::Chart c({"x1", "x2", "w"});
  EXPECT_THROW(
      k::check_rank_condition_sigmaT({}, c, {0.0, 0.0, 0.0}, plan),
      std::invalid_argument);
  std::vector<k::Expr> too_many = {var("w"), var("w"), var("w")};
  EXPECT_THROW(
      k::check_rank_condition_sigmaT(too_many, c, {0.0, 0.0, 0.0}, plan),
      std::invalid_argument);
}

TEST(AlgebraPresentation, DiagonalActionVerifies) {
  k::SamplePlan plan;
  auto sys = power_profile({1, -1});
  k::AlgebraPresentation pres;
  pres.generators = {unit_field(sys.chart(), 0), unit_field(sys.chart(), 1),
                     scaling_field(sys.chart(), {1, -1})};
  pres.action = {
      {k::Number::from_int(-1), k::Number::from_int(0)},
      {k::Number::from_int(0), k::Number::from_int(1)}};
  auto rep = k::verify_algebra_presentation(pres, sys.base_point(), plan);
  EXPECT_TRUE(rep.bracket_table.ok());
  EXPECT_TRUE(rep.ideal_abelian.ok());
  EXPECT_TRUE(rep.ok());
}

TEST(AlgebraPresentation, WrongTableIsCaught) {
  k::SamplePlan plan;
  auto sys = power_profile({1, -1});
  k::AlgebraPresentation pres;
  pres.generators = {unit_field(sys.chart(), 0), unit_field(sys.chart(), 1),
                     scaling_field(sys.chart(), {1, -1})};
  pres.action = {
      {k::Number::from_int(1), k::Number::from_int(0)},
      {k::Number::from_int(0), k::Number::from_int(1)}};
  auto rep = k::verify_algebra_presentation(pres, sys.base_point(), plan);
  EXPECT_EQ(rep.bracket_table.verdict, k::Verdict::kFalse);
  EXPECT_TRUE(rep.bracket_table.witness.has_value());
  EXPECT_FALSE(rep.ok());
}

TEST(AlgebraPresentation, DimensionMismatchThrows) {
  k::SamplePlan plan;
  auto sys = power_profile({1, -1});
  k::AlgebraPresentation pres;
  pres.generators = {unit_field(sys.chart(), 0), unit_field(sys.chart(), 1),
                     scaling_field(sys.chart(), {1, -1})};
  pres.action = {{k::Number::from_int(-1)}};
  EXPECT_THROW(k::verify_algebra_presentation(pres, sys.base_point(), plan),
               std::invalid_argument);
}

TEST(Integrality, RatiosMustBeIntegersAtLeastK) {
  using N = k::Number;
  EXPECT_FALSE(k::check_eigenvalue_integrality(
                   {N::from_int(1), N::from_int(2)}, 2)
                   .has_value());
  EXPECT_FALSE(k::check_eigenvalue_integrality(
                   {N(k::Rational(1)), N(k::Rational(3, 2))}, 2)
                   .has_value());

  auto low = k::check_eigenvalue_integrality(
      {N::from_int(2), N::from_int(1)}, 2);
  ASSERT_TRUE(low.has_value());
  EXPECT_NE(low->find(">= k = 2"), std::string::npos);
  EXPECT_NE(low->find("k*lambda_2/lambda_1 = 1"), std::string::npos);

  auto frac = k::check_eigenvalue_integrality(
      {N::from_int(2), N::from_int(3)}, 1);
  ASSERT_TRUE(frac.has_value());
  EXPECT_NE(frac->find("in Z"), std::string::npos);

  auto sign = k::check_eigenvalue_integrality(
      {N::from_int(1), N::from_int(-1)}, 1);
  ASSERT_TRUE(sign.has_value());
  EXPECT_NE(sign->find("> 0"), std::string::npos);

  EXPECT_THROW(k::check_eigenvalue_integrality({N(0.5)}, 1),
               std::invalid_argument);
  EXPECT_THROW(k::check_eigenvalue_integrality({}, 1), std::invalid_argument);
}

TEST(Integrality, ScaledDiagonalPassesThroughPresentation) {
  // x1' = w^2, x2' = w^4, w' = u carries the scaling symmetry
  // v0 = 2 x1 d/dx1 + 4 x2 d/dx2 + w d/dw with action diag(-2, -4); the
  // ratio test sees eigenvalues only up to common scale.
  k::SamplePlan plan;
  k::Chart c({"x1", "x2", "w"});
  k::Expr w2 = k::mul(var("w"), var("w"));
  k::VectorField f(c, {w2, k::mul(w2, w2), k::integer(0)});
  k::VectorField g = unit_field(c, 2);
  k::ControlSystem sys(c, f, {g}, {0.0, 0.0, 0.4});

  k::VectorField v0(c, {k::mul(k::integer(2), var("x1")),
                        k::mul(k::integer(4), var("x2")), var("w")});
  EXPECT_TRUE(k::is_infinitesimal_symmetry(sys, {v0, "v0"}, plan).yes());

  k::AlgebraPresentation pres;
  pres.generators = {unit_field(c, 0), unit_field(c, 1), v0};
  pres.action = {
      {k::Number::from_int(-2), k::Number::from_int(0)},
      {k::Number::from_int(0), k::Number::from_int(-4)}};
  pres.power = 2;
  auto rep = k::verify_algebra_presentation(pres, sys.base_point(), plan);
  EXPECT_TRUE(rep.bracket_table.ok());
  EXPECT_TRUE(rep.integrality_ok);
  EXPECT_TRUE(rep.ok());

  // diag(-2, -1) would need k*lambda_2/lambda_1 = 1 >= 2.
  pres.action[1][1] = k::Number::from_int(-1);
  auto bad = k::verify_algebra_presentation(pres, sys.base_point(), plan);
  EXPECT_FALSE(bad.integrality_ok);
  ASSERT_TRUE(bad.integrality_violation.has_value());
  EXPECT_NE(bad.integrality_violation->find(">= k"), std::string::npos);
}
