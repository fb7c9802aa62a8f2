#include "kappanu/geometry.hpp"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace k = kappanu;

namespace {

k::Chart xyw() { return k::Chart({"x", "y", "w"}); }

k::Expr var(const char* n) { return k::variable(n); }

k::VectorField basis(const k::Chart& c, std::size_t i) {
  std::vector<k::Expr> comps(c.dim(), k::integer(0));
  comps[i] = k::integer(1);
  return k::VectorField(c, comps);
}

bool vanishes(const k::VectorField& v, const std::vector<double>& center,
              const k::SamplePlan& plan) {
  return k::is_identically_zero(v.components(), v.chart().names(), center,
                                plan)
      .ok();
}

bool vanishes(const k::Expr& e, const std::vector<std::string>& names,
              const std::vector<double>& center, const k::SamplePlan& plan) {
  return k::is_identically_zero(e, names, center, plan).ok();
}

// Random polynomial 1 + linear + one quadratic monomial, small coefficients.
k::Expr rnd_poly(std::mt19937_64& rng, const k::Chart& c) {
  auto coef = [&rng] {
    return k::integer(static_cast<std::int64_t>(rng() % 5) - 2);
  };
  k::Expr e = coef();
  for (std::size_t i = 0; i < c.dim(); ++i) {
    e = k::add(e, k::mul(coef(), var(c.name(i).c_str())));
  }
  std::size_t a = rng() % c.dim();
  std::size_t b = rng() % c.dim();
  e = k::add(e, k::mul(coef(), k::mul(var(c.name(a).c_str()),
                                      var(c.name(b).c_str()))));
  return e;
}

k::VectorField rnd_field(std::mt19937_64& rng, const k::Chart& c) {
  std::vector<k::Expr> comps;
  for (std::size_t i = 0; i < c.dim(); ++i) comps.push_back(rnd_poly(rng, c));
  return k::VectorField(c, comps);
}

}  // namespace

TEST(Chart, Validation) {
  EXPECT_THROW(k::Chart({}), std::invalid_argument);
  EXPECT_THROW(k::Chart({"x", "x"}), std::invalid_argument);
  k::Chart c = xyw();
  EXPECT_EQ(c.dim(), 3u);
  EXPECT_EQ(c.index("w").value(), 2u);
  EXPECT_FALSE(c.index("z").has_value());
  EXPECT_THROW(k::VectorField(c, {k::integer(1)}), std::invalid_argument);
}

TEST(LieBracket, HandExamples) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  std::vector<double> origin = {0, 0, 0};

  // [d/dx, x d/dy] = d/dy
  k::VectorField f = basis(c, 0);
  k::VectorField g(c, {k::integer(0), var("x"), k::integer(0)});
  k::VectorField br = k::lie_bracket(f, g);
  EXPECT_TRUE(vanishes(k::vf_sub(br, basis(c, 1)), origin, plan));

  // Planar rotation profile: f = cos w dx + sin w dy, g = dw.
  k::VectorField fr(c, {k::cos(var("w")), k::sin(var("w")), k::integer(0)});
  k::VectorField gw = basis(c, 2);
  k::VectorField gf = k::lie_bracket(gw, fr);
  k::VectorField expected(
      c, {k::neg(k::sin(var("w"))), k::cos(var("w")), k::integer(0)});
  EXPECT_TRUE(vanishes(k::vf_sub(gf, expected), origin, plan));

  // f = dx, g = -y dx + x dy + dw: [f,g] = dy, [g,[g,f]] = -dx.
  k::VectorField f2 = basis(c, 0);
  k::VectorField g2(c, {k::neg(var("y")), var("x"), k::integer(1)});
  k::VectorField fg = k::lie_bracket(f2, g2);
  EXPECT_TRUE(vanishes(k::vf_sub(fg, basis(c, 1)), origin, plan));
  k::VectorField ggf = k::lie_bracket(g2, k::lie_bracket(g2, f2));
  EXPECT_TRUE(
      vanishes(k::vf_add(ggf, basis(c, 0)), origin, plan));
}

TEST(LieBracket, AlgebraicProperties) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  std::vector<double> center = {0.1, -0.2, 0.3};
  std::mt19937_64 rng(21);

  for (int trial = 0; trial < 6; ++trial) {
    k::VectorField f = rnd_field(rng, c);
    k::VectorField g = rnd_field(rng, c);
    k::VectorField h = rnd_field(rng, c);

    EXPECT_TRUE(vanishes(
        k::vf_add(k::lie_bracket(f, g), k::lie_bracket(g, f)), center, plan));

    k::VectorField jacobi = k::vf_add(
        k::vf_add(k::lie_bracket(f, k::lie_bracket(g, h)),
                  k::lie_bracket(g, k::lie_bracket(h, f))),
        k::lie_bracket(h, k::lie_bracket(f, g)));
    EXPECT_TRUE(vanishes(jacobi, center, plan));

    k::Expr alpha = rnd_poly(rng, c);
    k::VectorField leibniz = k::vf_sub(
        k::vf_sub(k::lie_bracket(f, k::vf_scale(alpha, g)),
                  k::vf_scale(alpha, k::lie_bracket(f, g))),
        k::vf_scale(k::lie_scalar(f, alpha), g));
    EXPECT_TRUE(vanishes(leibniz, center, plan));
  }
}

TEST(LieDerivative, IteratedAndOrder) {
  k::Chart c = xyw();
  k::VectorField dw = basis(c, 2);
  k::Expr w2 = k::mul(var("w"), var("w"));
  EXPECT_EQ(k::lie_derivative(dw, w2, 1), k::add(var("w"), var("w")));
  k::SamplePlan plan;
  EXPECT_TRUE(vanishes(k::sub(k::lie_derivative(dw, w2, 2), k::integer(2)),
                       c.names(), {0, 0, 0}, plan));

  k::VectorField dx = basis(c, 0);
  EXPECT_EQ(k::lie_derivative(dx, var("w"), 1), k::integer(0));
  // Second-order derivative of a w-profile along d/dx vanishes.
  EXPECT_EQ(k::lie_derivative(dx, var("w"), 2), k::integer(0));

  EXPECT_THROW(k::lie_derivative(dx, var("w"), 0), std::invalid_argument);
}

TEST(Determinant, ColumnsAndSparsity) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  std::vector<double> origin = {0, 0, 0};

  EXPECT_EQ(k::det_of_columns({basis(c, 0), basis(c, 1), basis(c, 2)}),
            k::integer(1));

  // Standard determinant of the column matrix: det(f, g, [g,f]) = -1 and
  // det(g, [g,f], [g,[g,f]]) = +1 for the rotation profile.
  k::VectorField fr(c, {k::cos(var("w")), k::sin(var("w")), k::integer(0)});
  k::VectorField gw = basis(c, 2);
  k::VectorField gf = k::lie_bracket(gw, fr);
  EXPECT_TRUE(vanishes(k::add(k::det_of_columns({fr, gw, gf}), k::integer(1)),
                       c.names(), origin, plan));
  k::VectorField ggf = k::lie_bracket(gw, gf);
  EXPECT_TRUE(
      vanishes(k::sub(k::det_of_columns({gw, gf, ggf}), k::integer(1)),
               c.names(), origin, plan));

  EXPECT_THROW(k::det_of_columns({basis(c, 0), basis(c, 1)}),
               std::invalid_argument);
}

TEST(Decompose, FrameExamples) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  std::vector<double> origin = {0, 0, 0};

  auto d = k::decompose_in_frame(basis(c, 1),
                                 {basis(c, 0), basis(c, 1), basis(c, 2)},
                                 origin, plan);
  ASSERT_TRUE(d.ok());
  EXPECT_EQ(d.coefficients[0], k::integer(0));
  EXPECT_EQ(d.coefficients[1], k::integer(1));
  EXPECT_EQ(d.coefficients[2], k::integer(0));

  // Planar rotation profile: lambda = (-1, 0, 0), k = (0, 0, 0).
  k::VectorField fr(c, {k::cos(var("w")), k::sin(var("w")), k::integer(0)});
  k::VectorField gw = basis(c, 2);
  k::VectorField gf = k::lie_bracket(gw, fr);
  k::VectorField ggf = k::lie_bracket(gw, gf);
  auto lam = k::decompose_in_frame(ggf, {fr, gw, gf}, origin, plan);
  ASSERT_TRUE(lam.ok());
  EXPECT_TRUE(vanishes(k::add(lam.coefficients[0], k::integer(1)), c.names(),
                       origin, plan));
  EXPECT_TRUE(vanishes(lam.coefficients[1], c.names(), origin, plan));
  EXPECT_TRUE(vanishes(lam.coefficients[2], c.names(), origin, plan));

  k::VectorField ffg = k::lie_bracket(fr, k::lie_bracket(fr, gw));
  auto kk = k::decompose_in_frame(ffg, {gw, gf, ggf}, origin, plan);
  ASSERT_TRUE(kk.ok());
  for (const auto& coeff : kk.coefficients) {
    EXPECT_TRUE(vanishes(coeff, c.names(), origin, plan));
  }
}

TEST(Decompose, SingularFrameRejected) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  auto d = k::decompose_in_frame(basis(c, 1),
                                 {basis(c, 0), basis(c, 0), basis(c, 2)},
                                 {0, 0, 0}, plan);
  EXPECT_FALSE(d.ok());
  EXPECT_EQ(d.frame_nonsingular.verdict, k::Verdict::kFalse);
  ASSERT_TRUE(d.frame_nonsingular.witness.has_value());
  EXPECT_TRUE(d.coefficients.empty());
}

TEST(Decompose, RecombinationProperty) {
  k::Chart c = xyw();
  k::SamplePlan plan;
  std::vector<double> center = {0.1, -0.2, 0.3};
  std::mt19937_64 rng(33);

  k::VectorField e1(c, {k::integer(1), k::integer(0), var("x")});
  k::VectorField e2(c, {var("w"), k::integer(1), k::integer(0)});
  k::VectorField e3(c, {k::integer(0), var("y"), k::integer(1)});

  for (int trial = 0; trial < 5; ++trial) {
    k::VectorField v = rnd_field(rng, c);
    auto d = k::decompose_in_frame(v, {e1, e2, e3}, center, plan);
    ASSERT_TRUE(d.frame_nonsingular.ok());
    EXPECT_TRUE(d.residual_zero.ok());
  }
}

TEST(SampledRank, FieldsAndCovectors) {
  k::Chart c = xyw();
  k::SamplePlan plan;

  auto r = k::sampled_rank({basis(c, 0), basis(c, 1), basis(c, 2)}, {0, 0, 0},
                           plan);
  EXPECT_EQ(r.rank, 3);
  EXPECT_TRUE(r.constant);
  EXPECT_EQ(r.verdict, k::Verdict::kTrue);

  // Differentials of h1 = w, h2 = w^2 on a chart (x, w) around w0 = 0.3:
  // proportional rows, rank 1.
  k::Chart xw({"x", "w"});
  auto dh1 = k::differential(k::variable("w"), xw);
  auto dh2 = k::differential(k::mul(k::variable("w"), k::variable("w")), xw);
  auto r2 = k::sampled_rank({dh1, dh2}, xw.names(), {0.0, 0.3}, plan);
  EXPECT_EQ(r2.rank, 1);
  EXPECT_TRUE(r2.constant);

  auto dx = k::differential(k::variable("x"), xw);
  auto r3 = k::sampled_rank({dh1, dx}, xw.names(), {0.0, 0.3}, plan);
  EXPECT_EQ(r3.rank, 2);
  EXPECT_TRUE(r3.constant);

  // Every sample singular: inconclusive.
  std::vector<k::Expr> bad = {k::ln(k::neg(k::add(k::integer(1),
                                                  k::mul(var("w"), var("w"))))),
                              k::integer(0)};
  auto r4 = k::sampled_rank({bad}, c.names(), {0, 0, 0}, plan);
  EXPECT_EQ(r4.verdict, k::Verdict::kInconclusive);
}
