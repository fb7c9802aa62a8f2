#pragma once

#include <string>
#include <vector>

#include "kappanu/invariants.hpp"

namespace kappanu {

// Subclasses of flat and centro-flat systems, ordered from general to
// special.  "Constant" is the sampled proxy: every first partial derivative
// of the function passes is_identically_zero on the box.
enum class Family {
  kNone,
  kFlat,                // kappa = 0
  kCentroFlat,          // nu = 0
  kFlatConstant,        // kappa constant, nu = 0
  kCentroFlatConstant,  // kappa = 0, nu constant
  kCompletelyFlat,      // kappa = 0, nu = 0
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kFlat: return "flat";
    case Family::kCentroFlat: return "centro-flat";
    case Family::kFlatConstant: return "flat-constant";
    case Family::kCentroFlatConstant: return "centro-flat-constant";
    case Family::kCompletelyFlat: return "completely-flat";
    case Family::kNone: break;
  }
  return "none";
}

enum class TrivialisabilityRoute { kCanonical, kRaw };

// A system is locally flat-straightenable exactly when, for its canonical
// pair, kappa = 0, L_{f_c} nu = 0, and L_{[f_c,g_c]} nu = 0.
struct TrivialisabilityReport {
  bool applicable = false;  // assumptions and canonicalization succeeded
  Verdict verdict = Verdict::kInconclusive;
  TrivialisabilityRoute route_used = TrivialisabilityRoute::kCanonical;
  CheckResult kappa_zero;
  CheckResult nu_along_drift;    // L_{f_c} nu
  CheckResult nu_along_bracket;  // L_{[f_c,g_c]} nu

  bool yes() const { return applicable && verdict == Verdict::kTrue; }
  bool no() const { return applicable && verdict == Verdict::kFalse; }
};

namespace detail {

inline Verdict combine_verdicts(std::initializer_list<Verdict> vs) {
  Verdict out = Verdict::kTrue;
  for (Verdict v : vs) {
    if (v == Verdict::kFalse) return Verdict::kFalse;
    if (v == Verdict::kInconclusive) out = Verdict::kInconclusive;
  }
  return out;
}

}  // namespace detail

inline TrivialisabilityReport check_trivialisable(
    const ControlSystem& sys, const SamplePlan& plan,
    TrivialisabilityRoute route = TrivialisabilityRoute::kCanonical) {
  TrivialisabilityReport out;
  out.route_used = route;
  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();

  Expr kappa, nu;
  VectorField f_c = sys.f();
  VectorField g_c = sys.g();
  if (route == TrivialisabilityRoute::kCanonical) {
    auto canon = canonicalize(sys, plan);
    if (!canon.ok()) return out;
    kappa = canon.pair->kappa;
    nu = canon.pair->nu;
    f_c = canon.pair->f_c;
    g_c = canon.pair->g_c;
  } else {
    // Direct route: assemble the canonical pair in place from the raw
    // structure functions, without recomputing anything on it.
    if (!check_assumptions(sys, plan).pass()) return out;
    auto res = compute_structure_functions(sys, plan);
    if (!res.ok()) return out;
    kappa = kappa_formula(res.sf, sys.f(), sys.g());
    nu = nu_formula(res.sf, sys.g());
    f_c = vf_add(sys.f(), vf_scale(res.sf.k3, sys.g()));
    g_c = vf_scale(pow(abs(res.sf.lambda1), rational(-1, 2)), sys.g());
  }
  out.applicable = true;

  out.kappa_zero = is_identically_zero(kappa, names, center, plan);
  out.nu_along_drift =
      is_identically_zero(lie_scalar(f_c, nu), names, center, plan);
  out.nu_along_bracket = is_identically_zero(
      lie_scalar(lie_bracket(f_c, g_c), nu), names, center, plan);
  out.verdict = detail::combine_verdicts({out.kappa_zero.verdict,
                                          out.nu_along_drift.verdict,
                                          out.nu_along_bracket.verdict});
  return out;
}

struct ClassificationReport {
  AssumptionReport assumptions;
  InvariantTriple invariants;
  TrivialisabilityReport trivialisable;

  CheckResult kappa_zero;
  CheckResult nu_zero;
  CheckResult kappa_constant;  // all first partials of kappa vanish
  CheckResult nu_constant;     // all first partials of nu vanish

  Family family = Family::kNone;
  // True when every predicate above reached a definite verdict.
  bool family_resolved = false;

  // When kappa and nu both pass the constancy test their product must
  // vanish; a failure here indicates an internal inconsistency.
  bool product_checked = false;
  CheckResult product_zero;

  bool ok() const {
    return assumptions.pass() && invariants.ok() && family_resolved &&
           (!product_checked || product_zero.ok());
  }
};

namespace detail {

inline CheckResult partials_vanish(const Expr& e, const Chart& chart,
                                   const std::vector<double>& center,
                                   const SamplePlan& plan) {
  std::vector<Expr> parts;
  parts.reserve(chart.dim());
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    parts.push_back(differentiate(e, chart.name(i)));
  }
  return is_identically_zero(parts, chart.names(), center, plan);
}

}  // namespace detail

inline ClassificationReport classify_family(const ControlSystem& sys,
                                            const SamplePlan& plan) {
  ClassificationReport out;
  out.assumptions = check_assumptions(sys, plan);
  if (!out.assumptions.pass()) return out;
  out.invariants = compute_invariants(sys, plan, InvariantMode::kDirect);
  if (!out.invariants.ok()) return out;
  // The canonical route recomputes structure functions on the transformed
  // pair and can starve on deep quotient towers; fall back to the in-place
  // assembly when that happens.
  out.trivialisable =
      check_trivialisable(sys, plan, TrivialisabilityRoute::kCanonical);
  if (!out.trivialisable.applicable) {
    out.trivialisable =
        check_trivialisable(sys, plan, TrivialisabilityRoute::kRaw);
  }

  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();
  out.kappa_zero =
      is_identically_zero(out.invariants.kappa, names, center, plan);
  out.nu_zero = is_identically_zero(out.invariants.nu, names, center, plan);
  out.kappa_constant = detail::partials_vanish(out.invariants.kappa,
                                               sys.chart(), center, plan);
  out.nu_constant =
      detail::partials_vanish(out.invariants.nu, sys.chart(), center, plan);

  out.family_resolved =
      out.kappa_zero.verdict != Verdict::kInconclusive &&
      out.nu_zero.verdict != Verdict::kInconclusive &&
      out.kappa_constant.verdict != Verdict::kInconclusive &&
      out.nu_constant.verdict != Verdict::kInconclusive;

  bool k0 = out.kappa_zero.ok();
  bool n0 = out.nu_zero.ok();
  bool kc = out.kappa_constant.ok();
  bool nc = out.nu_constant.ok();
  if (k0 && n0) {
    out.family = Family::kCompletelyFlat;
  } else if (n0 && kc) {
    out.family = Family::kFlatConstant;
  } else if (k0 && nc) {
    out.family = Family::kCentroFlatConstant;
  } else if (k0) {
    out.family = Family::kFlat;
  } else if (n0) {
    out.family = Family::kCentroFlat;
  } else {
    out.family = Family::kNone;
  }

  if (kc && nc) {
    out.product_checked = true;
    out.product_zero = is_identically_zero(
        mul(out.invariants.kappa, out.invariants.nu), names, center, plan);
  }
  return out;
}

// Integrability conditions behind the simultaneous rectification of
// span{f_c, [g_c,f_c]} and g_c.  For a canonical pair passing the
// trivialisability test all three residual groups vanish identically:
//   1. [f_c, [g_c,f_c]] = 0
//   2. [f_c, g_c] + [g_c, f_c] = 0
//   3. [[g_c,f_c], g_c] + epsilon f_c + nu [g_c,f_c] = 0
struct RectifiabilityReport {
  CheckResult first;
  CheckResult second;
  CheckResult third;
  double max_abs_first = 0, max_abs_second = 0, max_abs_third = 0;

  bool pass() const { return first.ok() && second.ok() && third.ok(); }
};

inline RectifiabilityReport check_rectifiability_conditions(
    const CanonicalPair& cp, const std::vector<double>& center,
    const SamplePlan& plan) {
  const Chart& chart = cp.f_c.chart();
  const auto& names = chart.names();
  VectorField gf = lie_bracket(cp.g_c, cp.f_c);

  VectorField r1 = lie_bracket(cp.f_c, gf);
  VectorField r2 = vf_add(lie_bracket(cp.f_c, cp.g_c), gf);
  VectorField r3 = vf_add(lie_bracket(gf, cp.g_c),
                          vf_add(vf_scale(integer(cp.epsilon), cp.f_c),
                                 vf_scale(cp.nu, gf)));

  RectifiabilityReport out;
  auto s1 = detail::scan_residual(r1.components(), names, center, plan);
  auto s2 = detail::scan_residual(r2.components(), names, center, plan);
  auto s3 = detail::scan_residual(r3.components(), names, center, plan);
  out.first = s1.check;
  out.second = s2.check;
  out.third = s3.check;
  out.max_abs_first = s1.max_abs;
  out.max_abs_second = s2.max_abs;
  out.max_abs_third = s3.max_abs;
  return out;
}

}  // namespace kappanu
