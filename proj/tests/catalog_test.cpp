#include "kappanu/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace k = kappanu;

namespace {

// Round-trip agreement between generated systems and their expected blocks
// is pinned at 1e-7; structural identities keep the default 1e-9.
k::SamplePlan agreement_plan() {
  k::SamplePlan plan;
  plan.abs_tol = 1e-7;
  plan.rel_tol = 1e-7;
  return plan;
}

void expect_matches(const k::Expr& got, const k::Expr& want,
                    const k::ControlSystem& sys, const char* label) {
  auto r = k::is_identically_zero(k::sub(got, want), sys.chart().names(),
                                  sys.base_point(), agreement_plan());
  EXPECT_TRUE(r.ok()) << label;
}

// nu is only pinned up to overall sign when its base-point value vanishes.
void expect_nu_matches(const k::Expr& got, const k::Expr& want,
                       const k::ControlSystem& sys) {
  k::Env env = k::make_env(sys.chart().names(), sys.base_point());
  auto base = k::evaluate(want, env);
  auto minus =
      k::is_identically_zero(k::sub(got, want), sys.chart().names(),
                             sys.base_point(), agreement_plan());
  if (base && std::fabs(*base) > 1e-9) {
    EXPECT_TRUE(minus.ok()) << "nu";
    return;
  }
  auto plus = k::is_identically_zero(k::add(got, want), sys.chart().names(),
                                     sys.base_point(), agreement_plan());
  EXPECT_TRUE(minus.ok() || plus.ok()) << "nu up to sign";
}

void roundtrip(const k::CatalogEntry& entry) {
  k::SamplePlan plan;
  auto triple =
      k::compute_invariants(entry.system, plan, k::InvariantMode::kDirect);
  ASSERT_TRUE(triple.ok());
  if (entry.expected.eps) EXPECT_EQ(triple.epsilon, *entry.expected.eps);
  if (entry.expected.kappa) {
    expect_matches(triple.kappa, *entry.expected.kappa, entry.system,
                   "kappa");
  }
  if (entry.expected.nu) {
    expect_nu_matches(triple.nu, *entry.expected.nu, entry.system);
  }
  auto rep = k::classify_family(entry.system, plan);
  if (entry.expected.family) {
    ASSERT_TRUE(rep.family_resolved);
    EXPECT_EQ(k::family_name(rep.family), k::family_name(*entry.expected.family));
  }
  if (entry.expected.trivialisable) {
    ASSERT_TRUE(rep.trivialisable.applicable);
    if (*entry.expected.trivialisable) {
      EXPECT_TRUE(rep.trivialisable.yes());
    } else {
      EXPECT_TRUE(rep.trivialisable.no());
    }
  }
}

}  // namespace

TEST(RoundTrip, ConstantCurvaturePairs) {
  for (int eps : {-1, 1}) {
    {
      k::CatalogParams p;
      p.eps = eps;
      SCOPED_TRACE("completely-flat eps=" + std::to_string(eps));
      roundtrip(k::generate("completely-flat", p));
    }
    for (double kappa : {0.0, 1.0, -1.0}) {
      k::CatalogParams p;
      p.eps = eps;
      p.kappa = kappa;
      SCOPED_TRACE("flat-constant eps=" + std::to_string(eps) +
                   " kappa=" + std::to_string(kappa));
      roundtrip(k::generate("flat-constant", p));
    }
  }
}

TEST(RoundTrip, ConstantNuLadder) {
  for (const char* family : {"centro-flat-constant", "sigma-T1"}) {
    for (int eps : {-1, 1}) {
      for (double nu : {0.0, 1.0, 2.0, 3.0}) {
        k::CatalogParams p;
        p.eps = eps;
        p.nu = nu;
        SCOPED_TRACE(std::string(family) + " eps=" + std::to_string(eps) +
                     " nu=" + std::to_string(nu));
        roundtrip(k::generate(family, p));
      }
    }
  }
}

TEST(RoundTrip, FlatQuadratures) {
  k::SamplePlan plan;
  k::Expr x = k::variable("x");
  k::Expr y = k::variable("y");
  for (int eps : {-1, 1}) {
    for (auto [nu1, nu0] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.0, 2.0}, {1.0, 0.0}, {1.0, 1.0}}) {
      k::CatalogParams p;
      p.eps = eps;
      p.nu1 = nu1;
      p.nu0 = nu0;
      SCOPED_TRACE("flat eps=" + std::to_string(eps) + " nu1=" +
                   std::to_string(nu1) + " nu0=" + std::to_string(nu0));
      auto entry = k::generate("flat", p);
      roundtrip(entry);

      // a, b, c sit in g = (a, x + b, c); they must solve their defining
      // first-order problems with the stated boundary values at y = 0.
      const auto& g = entry.system.g().components();
      k::Expr a = g[0];
      k::Expr b = k::sub(g[1], x);
      k::Expr c = g[2];
      auto names = entry.system.chart().names();
      std::vector<double> center = entry.system.base_point();
      k::Expr n1 = k::real(nu1);
      k::Expr n0 = k::real(nu0);
      std::vector<k::Expr> residuals = {
          k::sub(k::differentiate(a, "y"),
                 k::add(k::integer(eps), k::mul(n1, a))),
          k::sub(k::differentiate(b, "y"), k::sub(k::mul(n1, b), n0)),
          k::sub(k::differentiate(c, "y"), k::mul(n1, c)),
          k::substitute(a, {{"y", k::integer(0)}}),
          k::substitute(b, {{"y", k::integer(0)}}),
          k::sub(k::substitute(c, {{"y", k::integer(0)}}), k::integer(1))};
      auto res = k::is_identically_zero(residuals, names, center, plan);
      EXPECT_TRUE(res.ok());
    }
  }
}

TEST(RoundTrip, NonconstantCurvature) {
  for (int eps : {-1, 1}) {
    for (double shape : {1.0, -1.0}) {
      k::CatalogParams p;
      p.eps = eps;
      p.shape = shape;
      SCOPED_TRACE("centro-flat eps=" + std::to_string(eps) + " shape=" +
                   std::to_string(shape));
      auto entry = k::generate("centro-flat", p);
      EXPECT_EQ(entry.expected.family, k::Family::kCentroFlat);
      EXPECT_FALSE(*entry.expected.trivialisable);
      roundtrip(entry);
    }
  }
  k::CatalogParams flat;
  flat.eps = 1;
  flat.shape = 0.0;
  auto entry = k::generate("centro-flat", flat);
  EXPECT_EQ(entry.expected.family, k::Family::kCompletelyFlat);
  roundtrip(entry);
}

TEST(RoundTrip, RectifiedDriftProfiles) {
  k::Expr w = k::variable("w");
  for (int eps : {-1, 1}) {
    k::CatalogParams p;
    p.eps = eps;
    SCOPED_TRACE("sigma-T2 eps=" + std::to_string(eps) + " nu=w");
    auto entry = k::generate("sigma-T2", p);
    EXPECT_EQ(entry.expected.family, k::Family::kFlat);
    roundtrip(entry);
  }
  k::CatalogParams p;
  p.eps = -1;
  p.nu_of_w = k::integer(2);
  auto constant_nu = k::generate("sigma-T2", p);
  EXPECT_EQ(constant_nu.expected.family, k::Family::kCentroFlatConstant);
  roundtrip(constant_nu);
  p.nu_of_w = k::mul(w, w);
  auto quadratic = k::generate("sigma-T2", p);
  EXPECT_EQ(quadratic.expected.family, k::Family::kFlat);
  roundtrip(quadratic);
}

TEST(Profiles, WronskianFormulasMatchStructureFunctions) {
  k::SamplePlan plan;
  for (auto [pn, qn] : std::vector<std::pair<k::Rational, k::Rational>>{
           {k::Rational(1), k::Rational(-1)},
           {k::Rational(2), k::Rational(1)},
           {k::Rational(1), k::Rational(3)},
           {k::Rational(3, 2), k::Rational(1)}}) {
    k::CatalogParams p;
    p.p = pn;
    p.q = qn;
    SCOPED_TRACE("trivial-profile p=" + pn.str() + " q=" + qn.str());
    auto entry = k::generate("trivial-profile", p);
    auto sr = k::compute_structure_functions(entry.system, plan);
    ASSERT_TRUE(sr.ok());
    auto names = entry.system.chart().names();
    auto center = entry.system.base_point();
    std::vector<k::Expr> zeros = {sr.sf.k1, sr.sf.k2, sr.sf.k3, sr.sf.lambda2};
    EXPECT_TRUE(k::is_identically_zero(zeros, names, center, plan).ok());
    EXPECT_TRUE(k::is_identically_zero(
                    k::sub(sr.sf.lambda1, *entry.expected.lambda1), names,
                    center, plan)
                    .ok());
    EXPECT_TRUE(k::is_identically_zero(
                    k::sub(sr.sf.lambda3, *entry.expected.lambda3), names,
                    center, plan)
                    .ok());
    roundtrip(entry);
  }
}

TEST(Profiles, CanonicalWronskianRatioIsUnit) {
  k::SamplePlan plan;
  for (int eps : {-1, 1}) {
    for (double nu : {0.0, 1.0, 2.0, 3.0}) {
      k::CatalogParams p;
      p.eps = eps;
      p.nu = nu;
      auto entry = k::generate("sigma-T1", p);
      const auto& f = entry.system.f().components();
      k::Expr F1 = f[0];
      k::Expr F2 = f[1];
      k::Expr F1p = k::differentiate(F1, "w");
      k::Expr F2p = k::differentiate(F2, "w");
      k::Expr w_low = k::sub(k::mul(F1p, F2), k::mul(F1, F2p));
      k::Expr w_high = k::sub(k::mul(k::differentiate(F1p, "w"), F2p),
                           k::mul(F1p, k::differentiate(F2p, "w")));
      // W(F1', F2')/W(F1, F2) = -eps, cleared of the denominator.
      k::Expr residual =
          k::add(w_high, k::mul(k::integer(eps), w_low));
      SCOPED_TRACE("sigma-T1 eps=" + std::to_string(eps) + " nu=" +
                   std::to_string(nu));
      EXPECT_TRUE(k::is_identically_zero(residual,
                                         entry.system.chart().names(),
                                         entry.system.base_point(), plan)
                      .ok());
    }
  }
}

TEST(Scaling, SymmetricProfilesCarryTheirAlgebra) {
  k::SamplePlan plan;
  {
    k::CatalogParams p;
    p.lambda = {k::Rational(1), k::Rational(-1)};
    auto entry = k::generate("sigma-lambda", p);
    EXPECT_EQ(entry.expected.family, k::Family::kCompletelyFlat);
    roundtrip(entry);
    ASSERT_TRUE(entry.expected.symmetry.has_value());
    auto ver = k::verify_algebra_presentation(
        *entry.expected.symmetry, entry.system.base_point(), plan);
    EXPECT_TRUE(ver.ok());
    for (const auto& gen : entry.expected.symmetry->generators) {
      EXPECT_TRUE(
          k::is_infinitesimal_symmetry(entry.system, {gen, "gen"}, plan)
              .yes());
    }
  }
  {
    k::CatalogParams p;
    p.lambda = {k::Rational(2), k::Rational(1)};
    auto entry = k::generate("sigma-lambda", p);
    EXPECT_EQ(entry.expected.family, k::Family::kCentroFlatConstant);
    ASSERT_TRUE(entry.expected.nu.has_value());
    k::Env env;
    auto val = k::evaluate(*entry.expected.nu, env);
    ASSERT_TRUE(val.has_value());
    EXPECT_NEAR(*val, 3.0 / std::sqrt(2.0), 1e-12);
    roundtrip(entry);
  }
  {
    k::CatalogParams p;
    p.lambda = {k::Rational(1), k::Rational(2), k::Rational(3)};
    auto entry = k::generate("sigma-lambda", p);
    ASSERT_TRUE(entry.expected.symmetry.has_value());
    auto ver = k::verify_algebra_presentation(
        *entry.expected.symmetry, entry.system.base_point(), plan);
    EXPECT_TRUE(ver.ok());
    std::vector<k::SymmetryCandidate> translations;
    for (std::size_t i = 0; i + 1 < entry.expected.symmetry->generators.size();
         ++i) {
      translations.push_back(
          {entry.expected.symmetry->generators[i], "v"});
    }
    auto cert =
        k::check_abelian_trivialisation(entry.system, translations, plan);
    EXPECT_TRUE(cert.yes());
  }
}

TEST(Tangent, PowerFormsVerifyWithIntegrality) {
  k::SamplePlan plan;
  k::Expr w = k::variable("w");
  k::CatalogParams p;
  p.k = 2;
  p.lambda = {k::Rational(1), k::Rational(3, 2)};
  auto entry = k::generate("sigma-lambda-0k", p);
  const auto& f = entry.system.f().components();
  auto names = entry.system.chart().names();
  auto center = entry.system.base_point();
  std::vector<k::Expr> forms = {
      k::sub(f[0], k::mul(w, w)),
      k::sub(f[1], k::mul(w, k::mul(w, w)))};
  EXPECT_TRUE(k::is_identically_zero(forms, names, center, plan).ok());
  ASSERT_TRUE(entry.expected.symmetry.has_value());
  ASSERT_TRUE(entry.expected.symmetry->power.has_value());
  EXPECT_EQ(*entry.expected.symmetry->power, 2);
  auto ver =
      k::verify_algebra_presentation(*entry.expected.symmetry, center, plan);
  EXPECT_TRUE(ver.bracket_table.ok());
  EXPECT_TRUE(ver.ideal_abelian.ok());
  EXPECT_TRUE(ver.integrality_ok);
  for (const auto& gen : entry.expected.symmetry->generators) {
    EXPECT_TRUE(
        k::is_infinitesimal_symmetry(entry.system, {gen, "gen"}, plan)
            .yes());
  }

  k::CatalogParams single;
  single.k = 1;
  single.lambda = {k::Rational(1), k::Rational(2)};
  auto linear = k::generate("sigma-lambda-0k", single);
  auto lv = k::verify_algebra_presentation(*linear.expected.symmetry,
                                           linear.system.base_point(), plan);
  EXPECT_TRUE(lv.ok());

  k::CatalogParams off;
  off.k = 2;
  off.lambda = {k::Rational(1), k::Rational(3, 2)};
  off.eta = {1, 0};
  auto muted = k::generate("sigma-lambda-0k", off);
  EXPECT_TRUE(muted.system.f().components()[1].is_zero());
}

TEST(Canonical, GeneratedFormsAreAlreadyCanonical) {
  k::SamplePlan plan;
  std::vector<k::CatalogEntry> entries;
  {
    k::CatalogParams p;
    p.eps = -1;
    p.nu = 1.0;
    entries.push_back(k::generate("sigma-T1", p));
    entries.push_back(k::generate("centro-flat-constant", p));
  }
  {
    k::CatalogParams p;
    p.eps = 1;
    entries.push_back(k::generate("sigma-T2", p));
  }
  {
    k::CatalogParams p;
    p.eps = 1;
    p.nu1 = 1.0;
    entries.push_back(k::generate("flat", p));
  }
  {
    k::CatalogParams p;
    p.eps = -1;
    p.kappa = 1.0;
    entries.push_back(k::generate("flat-constant", p));
  }
  {
    k::CatalogParams p;
    p.eps = 1;
    p.shape = 1.0;
    entries.push_back(k::generate("centro-flat", p));
  }
  for (const auto& entry : entries) {
    SCOPED_TRACE(entry.family);
    auto cz = k::canonicalize(entry.system, plan);
    ASSERT_TRUE(cz.ok());
    auto names = entry.system.chart().names();
    auto center = entry.system.base_point();
    EXPECT_TRUE(k::is_identically_zero(cz.pair->used.alpha, names, center,
                                       plan)
                    .ok());
    EXPECT_TRUE(k::is_identically_zero(
                    k::sub(cz.pair->used.beta, k::integer(1)), names, center,
                    plan)
                    .ok());
  }
}

TEST(Canonical, DriftSquaredKillsNuOnRectifiedDrift) {
  k::SamplePlan plan;
  k::CatalogParams p;
  p.eps = -1;
  auto entry = k::generate("sigma-T2", p);
  k::Expr nu = *entry.expected.nu;
  k::Expr twice = k::lie_scalar(entry.system.f(),
                             k::lie_scalar(entry.system.f(), nu));
  EXPECT_TRUE(k::is_identically_zero(twice, entry.system.chart().names(),
                                     entry.system.base_point(), plan)
                  .ok());
}

TEST(Errors, ViolatedInequalitiesAreNamed) {
  auto message_of = [](const std::string& family, const k::CatalogParams& p) {
    try {
      k::generate(family, p);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  k::CatalogParams p;
  p.eps = 0;
  EXPECT_NE(message_of("completely-flat", p).find("eps in {-1,+1}"),
            std::string::npos);

  p = {};
  p.nu = -1.0;
  EXPECT_NE(message_of("centro-flat-constant", p).find("nu >= 0"),
            std::string::npos);

  p = {};
  p.kappa = 8.0;
  EXPECT_NE(message_of("flat-constant", p).find("|kappa| < 8"),
            std::string::npos);

  p = {};
  p.shape = 4.0;
  EXPECT_NE(message_of("centro-flat", p).find("|shape| < 4"),
            std::string::npos);

  p = {};
  p.p = k::Rational(1);
  p.q = k::Rational(1);
  EXPECT_NE(message_of("trivial-profile", p).find("p != q"),
            std::string::npos);
  p.q = k::Rational(0);
  EXPECT_NE(message_of("trivial-profile", p).find("q != 0"),
            std::string::npos);

  p = {};
  p.k = 2;
  p.lambda = {k::Rational(1), k::Rational(1, 2)};
  auto msg = message_of("sigma-lambda-0k", p);
  EXPECT_NE(msg.find("k*lambda_2/lambda_1 = 1"), std::string::npos);
  EXPECT_NE(msg.find(">= k = 2"), std::string::npos);
  p.k = 0;
  EXPECT_NE(message_of("sigma-lambda-0k", p).find("k >= 1"),
            std::string::npos);

  p = {};
  p.lambda = {k::Rational(1), k::Rational(0)};
  EXPECT_NE(message_of("sigma-lambda", p).find("lambda_i != 0"),
            std::string::npos);
  p.lambda = {k::Rational(1), k::Rational(2)};
  p.eta = {0, 1};
  EXPECT_NE(message_of("sigma-lambda", p).find("eta_1 = 1"),
            std::string::npos);

  p = {};
  p.nu_of_w = k::variable("x");
  EXPECT_NE(message_of("sigma-T2", p).find("depend on w only"),
            std::string::npos);

  EXPECT_THROW(k::generate("no-such-family", {}), std::invalid_argument);
}

TEST(Families, ListedAndGenerable) {
  const auto& ids = k::catalog_families();
  EXPECT_EQ(ids.size(), 10u);
  for (const char* required :
       {"completely-flat", "centro-flat-constant", "sigma-lambda-0k"}) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), required), ids.end());
  }
}
