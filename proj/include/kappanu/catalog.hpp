#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kappanu/classify.hpp"
#include "kappanu/symmetry.hpp"

namespace kappanu {

// Parameters for the generators below. Each family reads only the fields it
// documents; the rest keep their defaults.
struct CatalogParams {
  int eps = -1;              // sign invariant, -1 or +1
  double nu = 0.0;           // constant centro-affine curvature, >= 0
  double kappa = 0.0;        // constant curvature
  double nu1 = 0.0;          // nu = nu1 x + nu0 for the general flat form
  double nu0 = 0.0;
  double shape = 1.0;        // r = 1 + shape (x^3 + y^3)
  std::optional<Expr> nu_of_w;     // rectified-drift form, defaults to w
  std::vector<Rational> lambda;    // scaling eigenvalues
  std::vector<int> eta;            // 0/1 weights, eta_1 = 1; default all 1
  int k = 1;                       // order of tangency, >= 1
  Rational p = Rational(1);        // power-pair profile exponents
  Rational q = Rational(-1);
};

// Frozen results a generated system must reproduce under analysis. nu is
// recorded up to an overall sign when its base-point value is zero.
struct ExpectedResults {
  std::optional<int> eps;
  std::optional<Expr> kappa;
  std::optional<Expr> nu;
  std::optional<Expr> lambda1;  // profile forms expose these two directly
  std::optional<Expr> lambda3;
  std::optional<bool> trivialisable;
  std::optional<Family> family;
  std::optional<AlgebraPresentation> symmetry;
};

struct CatalogEntry {
  std::string family;
  CatalogParams params;
  ControlSystem system;
  ExpectedResults expected;
};

inline const std::vector<std::string>& catalog_families() {
  static const std::vector<std::string> ids = {
      "completely-flat",   "flat",
      "centro-flat",       "flat-constant",
      "centro-flat-constant", "trivial-profile",
      "sigma-T1",          "sigma-T2",
      "sigma-lambda",      "sigma-lambda-0k"};
  return ids;
}

namespace detail {

inline void require_eps(int eps) {
  if (eps != -1 && eps != 1) {
    throw std::invalid_argument("eps must satisfy eps in {-1,+1}");
  }
}

inline Expr c_eps(int eps, const Expr& w) {
  return eps == -1 ? cos(w) : cosh(w);
}

inline Expr s_eps(int eps, const Expr& w) {
  return eps == -1 ? sin(w) : sinh(w);
}

inline Chart planar_chart() { return Chart({"x", "y", "w"}); }

inline ControlSystem profile(const Expr& F1, const Expr& F2,
                             const Expr& g_w) {
  Chart c = planar_chart();
  VectorField f(c, {F1, F2, integer(0)});
  VectorField g(c, {integer(0), integer(0), g_w});
  return ControlSystem(c, f, {g}, {0.0, 0.0, 0.0});
}

inline Family constant_pair_family(bool kappa_zero, double nu_value) {
  if (kappa_zero) {
    return nu_value == 0.0 ? Family::kCompletelyFlat
                           : Family::kCentroFlatConstant;
  }
  return Family::kFlatConstant;
}

// Family of a flat system whose nu is sampled from expressions; used by the
// rectified-drift generator where nu(w) is caller-supplied.
inline Family flat_family_from_nu(const Expr& nu, const Chart& chart,
                                  const std::vector<double>& center) {
  SamplePlan plan;
  bool nu_zero =
      is_identically_zero(nu, chart.names(), center, plan).ok();
  if (nu_zero) return Family::kCompletelyFlat;
  std::vector<Expr> grads;
  for (const auto& name : chart.names()) {
    grads.push_back(differentiate(nu, name));
  }
  bool nu_const =
      is_identically_zero(grads, chart.names(), center, plan).ok();
  return nu_const ? Family::kCentroFlatConstant : Family::kFlat;
}

inline int sign_of(const Rational& r) { return r.is_negative() ? -1 : 1; }

}  // namespace detail

// Builds the named normal form together with its expected analysis results.
// Throws std::invalid_argument naming the violated parameter constraint.
inline CatalogEntry generate(const std::string& family,
                             const CatalogParams& params) {
  Expr x = variable("x");
  Expr y = variable("y");
  Expr w = variable("w");

  if (family == "completely-flat") {
    detail::require_eps(params.eps);
    ControlSystem sys =
        detail::profile(detail::c_eps(params.eps, w),
                        detail::s_eps(params.eps, w), integer(1));
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = integer(0);
    expect.nu = integer(0);
    expect.trivialisable = true;
    expect.family = Family::kCompletelyFlat;
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "flat") {
    // f = d/dx, g = (a, x + b, c) with constant nu1, nu0; the quadratures
    // for a, b, c collapse to elementary functions:
    //   a = eps (e^{nu1 y} - 1)/nu1, b = -nu0 (e^{nu1 y} - 1)/nu1,
    //   c = e^{nu1 y}, with the nu1 = 0 limits a = eps y, b = -nu0 y, c = 1.
    detail::require_eps(params.eps);
    Chart c = detail::planar_chart();
    Expr a, b, cc;
    if (params.nu1 == 0.0) {
      a = mul(integer(params.eps), y);
      b = mul(real(-params.nu0), y);
      cc = integer(1);
    } else {
      Expr growth = sub(exp(mul(real(params.nu1), y)), integer(1));
      a = mul(real(params.eps / params.nu1), growth);
      b = mul(real(-params.nu0 / params.nu1), growth);
      cc = exp(mul(real(params.nu1), y));
    }
    VectorField f(c, {integer(1), integer(0), integer(0)});
    VectorField g(c, {a, add(x, b), cc});
    ControlSystem sys(c, f, {g}, {0.0, 0.0, 0.0});
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = integer(0);
    Expr nu_expr = add(mul(real(params.nu1), x), real(params.nu0));
    expect.nu = params.nu0 < 0.0 ? neg(nu_expr) : nu_expr;
    expect.trivialisable = params.nu1 == 0.0;
    if (params.nu1 != 0.0) {
      expect.family = Family::kFlat;
    } else {
      expect.family = detail::constant_pair_family(true, params.nu0);
    }
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "centro-flat") {
    // r = 1 + shape (x^3 + y^3) stays positive on the sample box and gives
    // a genuinely nonconstant curvature; kappa follows from
    // kappa = r_x^2 - eps r_y^2 - r (r_xx - eps r_yy), the polynomial form
    // of the defining PDE.
    detail::require_eps(params.eps);
    if (!(std::fabs(params.shape) < 4.0)) {
      throw std::invalid_argument(
          "shape must satisfy |shape| < 4 (r > 0 on the sample box)");
    }
    Chart c = detail::planar_chart();
    Expr r = add(integer(1),
                 mul(real(params.shape),
                     add(mul(mul(x, x), x), mul(mul(y, y), y))));
    Expr rx = differentiate(r, "x");
    Expr ry = differentiate(r, "y");
    Expr rxx = differentiate(rx, "x");
    Expr ryy = differentiate(ry, "y");
    Expr eps = integer(params.eps);
    Expr kappa = sub(sub(mul(rx, rx), mul(eps, mul(ry, ry))),
                     mul(r, sub(rxx, mul(eps, ryy))));
    Expr ce = detail::c_eps(params.eps, w);
    Expr se = detail::s_eps(params.eps, w);
    VectorField f(c, {mul(r, ce), mul(r, se),
                      add(mul(eps, mul(ry, ce)), mul(rx, se))});
    VectorField g(c, {integer(0), integer(0), integer(1)});
    ControlSystem sys(c, f, {g}, {0.0, 0.0, 0.0});
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = kappa;
    expect.nu = integer(0);
    expect.trivialisable = params.shape == 0.0;
    expect.family = params.shape == 0.0 ? Family::kCompletelyFlat
                                     : Family::kCentroFlat;
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "flat-constant") {
    detail::require_eps(params.eps);
    if (!(std::fabs(params.kappa) < 8.0)) {
      throw std::invalid_argument(
          "kappa must satisfy |kappa| < 8 (r > 0 on the sample box)");
    }
    Chart c = detail::planar_chart();
    Expr kap = real(params.kappa);
    Expr r = sub(integer(1),
                 mul(mul(rational(1, 4), kap),
                     sub(mul(x, x), mul(integer(params.eps), mul(y, y)))));
    Expr ce = detail::c_eps(params.eps, w);
    Expr se = detail::s_eps(params.eps, w);
    // Same drift recipe as the nonconstant family; for this r the twist
    // collapses to (kappa/2)(y c_eps - x s_eps) and the pair is already
    // canonical (k2 = k3 = 0, |lambda1| = 1).
    Expr eps = integer(params.eps);
    Expr twist = add(mul(eps, mul(differentiate(r, "y"), ce)),
                     mul(differentiate(r, "x"), se));
    VectorField f(c, {mul(r, ce), mul(r, se), twist});
    VectorField g(c, {integer(0), integer(0), integer(1)});
    ControlSystem sys(c, f, {g}, {0.0, 0.0, 0.0});
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = kap;
    expect.nu = integer(0);
    expect.trivialisable = params.kappa == 0.0;
    expect.family = detail::constant_pair_family(params.kappa == 0.0, 0.0);
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "centro-flat-constant" || family == "sigma-T1") {
    // Both families realise constant nu >= 0 through fundamental solutions
    // of F'' = l3 F' + l1 F. The canonical profile (sigma-T1) uses
    // (l3, l1) = (nu, eps) and w' = u; the other one doubles the exponents
    // and compensates with w' = u/2, except for the critical eps = -1,
    // nu = 2 case which keeps w' = u.
    detail::require_eps(params.eps);
    if (!(params.nu >= 0.0)) {
      throw std::invalid_argument("nu must satisfy nu >= 0");
    }
    bool canonical_scale = family == "sigma-T1";
    bool critical = params.eps == -1 && params.nu == 2.0;
    double scale = canonical_scale ? 0.5 : 1.0;
    Expr g_w = canonical_scale || critical ? integer(1) : rational(1, 2);
    double disc = params.nu * params.nu + 4.0 * params.eps;
    Expr F1, F2;
    if (critical) {
      F1 = exp(w);
      F2 = mul(w, exp(w));
    } else if (disc > 0.0) {
      double root = std::sqrt(disc);
      F1 = exp(mul(real(scale * (params.nu + root)), w));
      F2 = exp(mul(real(scale * (params.nu - root)), w));
    } else {
      double omega = std::sqrt(-disc);
      Expr envelope = exp(mul(real(scale * params.nu), w));
      F1 = mul(envelope, cos(mul(real(scale * omega), w)));
      F2 = mul(envelope, sin(mul(real(scale * omega), w)));
    }
    ControlSystem sys = detail::profile(F1, F2, g_w);
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = integer(0);
    expect.nu = real(params.nu);
    expect.trivialisable = true;
    expect.family = detail::constant_pair_family(true, params.nu);
    if (canonical_scale) {
      expect.lambda1 = integer(params.eps);
      expect.lambda3 = real(params.nu);
    }
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "sigma-T2") {
    detail::require_eps(params.eps);
    Chart c = detail::planar_chart();
    Expr nu = params.nu_of_w ? *params.nu_of_w : w;
    SamplePlan probe;
    std::vector<Expr> off_axis = {differentiate(nu, "x"),
                                  differentiate(nu, "y")};
    if (!is_identically_zero(off_axis, c.names(), {0.0, 0.0, 0.0}, probe)
             .ok()) {
      throw std::invalid_argument("nu_of_w must depend on w only");
    }
    VectorField f(c, {integer(1), integer(0), integer(0)});
    VectorField g(c, {mul(integer(params.eps), y),
                      sub(x, mul(nu, y)), integer(1)});
    ControlSystem sys(c, f, {g}, {0.0, 0.0, 0.0});
    ExpectedResults expect;
    expect.eps = params.eps;
    expect.kappa = integer(0);
    expect.nu = nu;
    expect.trivialisable = true;
    expect.family = detail::flat_family_from_nu(nu, c, sys.base_point());
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "trivial-profile") {
    // F1 = (w+1)^p, F2 = (w+1)^q. The Wronskian formulas collapse to
    // lambda1 = -pq/(w+1)^2 and lambda3 = (p+q-1)/(w+1), giving the
    // constant invariants eps = -sgn(pq), kappa = 0, nu = |p+q|/sqrt|pq|.
    if (params.p == params.q) {
      throw std::invalid_argument(
          "exponents must satisfy p != q (W(F1,F2) != 0)");
    }
    if (params.p.is_zero() || params.q.is_zero()) {
      throw std::invalid_argument(
          "exponents must satisfy p != 0 and q != 0 (lambda1 != 0)");
    }
    Expr base = add(w, integer(1));
    Expr F1 = pow(base, constant(Number(params.p)));
    Expr F2 = pow(base, constant(Number(params.q)));
    ControlSystem sys = detail::profile(F1, F2, integer(1));
    double pd = params.p.to_double();
    double qd = params.q.to_double();
    ExpectedResults expect;
    expect.eps = detail::sign_of(params.p) * detail::sign_of(params.q) == 1
                  ? -1
                  : 1;
    expect.kappa = integer(0);
    double nu_value = std::fabs(pd + qd) / std::sqrt(std::fabs(pd * qd));
    expect.nu = real(nu_value);
    Number pq = Number::mul(Number(params.p), Number(params.q));
    Number sum1 = Number::add(Number::add(Number(params.p),
                                          Number(params.q)),
                              Number::from_int(-1));
    expect.lambda1 = mul(constant(Number::neg(pq)), pow(base, integer(-2)));
    expect.lambda3 = mul(constant(sum1), pow(base, integer(-1)));
    expect.trivialisable = true;
    expect.family = detail::constant_pair_family(true, nu_value);
    return {family, params, std::move(sys), std::move(expect)};
  }

  if (family == "sigma-lambda" || family == "sigma-lambda-0k") {
    if (params.lambda.empty()) {
      throw std::invalid_argument("lambda must be nonempty");
    }
    std::vector<int> eta = params.eta;
    if (eta.empty()) eta.assign(params.lambda.size(), 1);
    if (eta.size() != params.lambda.size()) {
      throw std::invalid_argument("eta size must match lambda size");
    }
    if (eta[0] != 1) {
      throw std::invalid_argument("eta must satisfy eta_1 = 1");
    }
    for (int e : eta) {
      if (e != 0 && e != 1) {
        throw std::invalid_argument("eta must satisfy eta_i in {0,1}");
      }
    }
    bool tangent = family == "sigma-lambda-0k";
    std::vector<Number> eigen;
    for (const Rational& l : params.lambda) eigen.push_back(Number(l));
    if (tangent) {
      if (params.k < 1) {
        throw std::invalid_argument("k must satisfy k >= 1");
      }
      if (auto violation = check_eigenvalue_integrality(eigen, params.k)) {
        throw std::invalid_argument(*violation);
      }
    } else {
      for (const Rational& l : params.lambda) {
        if (l.is_zero()) {
          throw std::invalid_argument(
              "lambda must satisfy lambda_i != 0 (nonsingular action)");
        }
      }
    }

    std::size_t p = params.lambda.size();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < p; ++i) {
      names.push_back("x" + std::to_string(i + 1));
    }
    names.push_back("w");
    Chart c(names);
    std::vector<Expr> f_comps;
    for (std::size_t i = 0; i < p; ++i) {
      Expr fi;
      if (tangent) {
        Number m = Number::div(
            Number::mul(Number::from_int(params.k), eigen[i]), eigen[0]);
        fi = pow(w, constant(m));
      } else {
        fi = pow(add(w, integer(1)), constant(eigen[i]));
      }
      if (eta[i] == 0) fi = integer(0);
      f_comps.push_back(fi);
    }
    f_comps.push_back(integer(0));
    std::vector<Expr> g_comps(names.size(), integer(0));
    g_comps.back() = integer(1);
    ControlSystem sys(c, VectorField(c, f_comps),
                      {VectorField(c, g_comps)},
                      std::vector<double>(names.size(), 0.0));

    AlgebraPresentation pres;
    std::vector<Expr> v0_comps;
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<Expr> comps(names.size(), integer(0));
      comps[i] = integer(1);
      pres.generators.emplace_back(c, comps);
      v0_comps.push_back(mul(constant(eigen[i]), variable(names[i])));
    }
    if (tangent) {
      Number rate = Number::div(eigen[0], Number::from_int(params.k));
      v0_comps.push_back(mul(constant(rate), w));
      pres.power = params.k;
    } else {
      v0_comps.push_back(add(w, integer(1)));
    }
    pres.generators.emplace_back(c, v0_comps);
    pres.action.assign(p, std::vector<Number>(p, Number::from_int(0)));
    for (std::size_t i = 0; i < p; ++i) {
      pres.action[i][i] = Number::neg(eigen[i]);
    }

    ExpectedResults expect;
    expect.symmetry = std::move(pres);
    expect.trivialisable = true;
    bool full = !tangent && p == 2 && eta[0] == 1 && eta[1] == 1 &&
                !(params.lambda[0] == params.lambda[1]);
    if (full) {
      double l1 = params.lambda[0].to_double();
      double l2 = params.lambda[1].to_double();
      expect.eps = detail::sign_of(params.lambda[0]) *
                            detail::sign_of(params.lambda[1]) ==
                        1
                    ? -1
                    : 1;
      expect.kappa = integer(0);
      double nu_value = std::fabs(l1 + l2) / std::sqrt(std::fabs(l1 * l2));
      expect.nu = real(nu_value);
      expect.family = detail::constant_pair_family(true, nu_value);
    }
    if (tangent) expect.trivialisable = std::nullopt;
    return {family, params, std::move(sys), std::move(expect)};
  }

  throw std::invalid_argument("unknown catalog family: " + family);
}

}  // namespace kappanu
