#pragma once

#include <optional>
#include <string>

#include "kappanu/feedback.hpp"

namespace kappanu {

// (f_c, g_c) = (f + g k3, |lambda1|^{-1/2} g) together with the structure
// coefficients recomputed on it: [f_c,[f_c,g_c]] = kappa g_c and
// [g_c,[g_c,f_c]] = epsilon f_c + mu g_c + nu [g_c,f_c].
struct CanonicalPair {
  VectorField f_c;
  VectorField g_c;
  FeedbackTransform used;
  Expr kappa;
  Expr mu;
  Expr nu;
  Expr lambda1;  // recomputed; identically epsilon on the box
  int epsilon = 0;
};

struct CanonicalizationResult {
  std::optional<CanonicalPair> pair;
  AssumptionReport assumptions;
  StructureResult raw;        // structure functions of the input system
  StructureResult canonical;  // recomputed on (f_c, g_c)
  CheckResult k3_zero;
  CheckResult k2_zero;
  CheckResult unit_lambda1;   // |recomputed lambda1| = 1
  CheckResult mu_consistent;  // mu = L_{f_c} nu
  CheckResult epsilon_constant;

  bool ok() const {
    return pair.has_value() && assumptions.pass() && raw.ok() &&
           canonical.ok() && k3_zero.ok() && k2_zero.ok() &&
           unit_lambda1.ok() && mu_consistent.ok() && epsilon_constant.ok();
  }
};

namespace detail {

// Sign of e near the base point: the base value when it evaluates cleanly
// above tolerance, otherwise the first decisive sampled value.
inline int sign_near(const Expr& e, const std::vector<std::string>& names,
                     const std::vector<double>& center,
                     const SamplePlan& plan) {
  double tol = plan.abs_tol;
  Env env = make_env(names, center);
  if (auto v = evaluate(e, env)) {
    if (std::fabs(*v) > tol) return *v > 0 ? 1 : -1;
  }
  PointSampler sampler(names, center, plan);
  for (int i = 0; i < plan.samples + plan.max_resamples; ++i) {
    Env s = make_env(names, sampler.next_point());
    if (auto v = evaluate(e, s)) {
      if (std::fabs(*v) > tol) return *v > 0 ? 1 : -1;
    }
  }
  return 0;
}

}  // namespace detail

inline CanonicalizationResult canonicalize(const ControlSystem& sys,
                                           const SamplePlan& plan) {
  CanonicalizationResult out;
  out.assumptions = check_assumptions(sys, plan);
  if (!out.assumptions.pass()) return out;
  out.raw = compute_structure_functions(sys, plan);
  if (!out.raw.ok()) return out;

  const StructureFunctions& sf = out.raw.sf;
  FeedbackTransform t{sf.k3, pow(abs(sf.lambda1), rational(-1, 2))};
  auto applied = apply_feedback(sys, t, plan);
  if (!applied.ok()) return out;

  out.canonical = compute_structure_functions(*applied.system, plan);
  if (!out.canonical.ok()) return out;
  const StructureFunctions& cf = out.canonical.sf;

  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();
  out.k3_zero = is_identically_zero(cf.k3, names, center, plan);
  out.k2_zero = is_identically_zero(cf.k2, names, center, plan);
  out.unit_lambda1 = is_identically_zero(
      sub(abs(cf.lambda1), integer(1)), names, center, plan);

  int eps = detail::sign_near(cf.lambda1, names, center, plan);
  out.epsilon_constant = is_identically_zero(
      sub(sign(cf.lambda1), integer(eps)), names, center, plan);

  CanonicalPair cp{applied.system->f(),
                   applied.system->g(),
                   t,
                   cf.k1,
                   cf.lambda2,
                   cf.lambda3,
                   cf.lambda1,
                   eps};
  out.mu_consistent = is_identically_zero(
      sub(cp.mu, lie_scalar(cp.f_c, cp.nu)), names, center, plan);
  out.pair = std::move(cp);
  return out;
}

enum class InvariantMode { kDirect, kViaCanonical };

struct InvariantTriple {
  int epsilon = 0;
  Expr kappa;
  Expr nu;            // sign-normalized for reporting
  int nu_sign = 1;    // factor applied to the computed nu
  std::string nu_convention;
  CheckResult epsilon_constant;
  bool valid = false;

  bool ok() const { return valid; }
};

namespace detail {

// Reported nu has nu(base) >= 0; ties broken by the first decisive sample.
inline void normalize_nu(InvariantTriple& inv,
                         const std::vector<std::string>& names,
                         const std::vector<double>& center,
                         const SamplePlan& plan) {
  int s = sign_near(inv.nu, names, center, plan);
  if (s == 0) {
    inv.nu_sign = 1;
    inv.nu_convention = "nu vanishes at every decisive sample; sign +1 kept";
    return;
  }
  Env env = make_env(names, center);
  auto base = evaluate(inv.nu, env);
  bool from_base = base && std::fabs(*base) > plan.abs_tol;
  inv.nu_sign = s > 0 ? 1 : -1;
  if (inv.nu_sign < 0) inv.nu = neg(inv.nu);
  inv.nu_convention = std::string("sign fixed by ") +
                      (from_base ? "value at base point" :
                                   "first decisive sample") +
                      (inv.nu_sign < 0 ? "; computed nu was negated" : "");
}

}  // namespace detail

// Direct assembly from the raw structure functions:
//   kappa = k1 + (1/2) L_f s + (1/4) s^2 + L_{[g,f]} k3 + (1/2) k3 L_g s
//   with s = k2 - L_g k3, and
//   nu = |lambda1|^{-1/2} (lambda3 - (1/2) L_g lambda1 / lambda1).
inline Expr kappa_formula(const StructureFunctions& sf, const VectorField& f,
                          const VectorField& g) {
  VectorField gf = lie_bracket(g, f);
  Expr s = sf.k2 - lie_scalar(g, sf.k3);
  return sf.k1 + rational(1, 2) * lie_scalar(f, s) +
         rational(1, 4) * s * s + lie_scalar(gf, sf.k3) +
         rational(1, 2) * sf.k3 * lie_scalar(g, s);
}

inline Expr nu_formula(const StructureFunctions& sf, const VectorField& g) {
  Expr log_deriv = div(lie_scalar(g, sf.lambda1), sf.lambda1);
  return pow(abs(sf.lambda1), rational(-1, 2)) *
         (sf.lambda3 - rational(1, 2) * log_deriv);
}

inline InvariantTriple compute_invariants(const ControlSystem& sys,
                                          const SamplePlan& plan,
                                          InvariantMode mode) {
  InvariantTriple inv;
  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();

  if (mode == InvariantMode::kDirect) {
    if (!check_assumptions(sys, plan).pass()) return inv;
    auto res = compute_structure_functions(sys, plan);
    if (!res.ok()) return inv;
    inv.kappa = kappa_formula(res.sf, sys.f(), sys.g());
    inv.nu = nu_formula(res.sf, sys.g());
    inv.epsilon = detail::sign_near(res.sf.lambda1, names, center, plan);
    inv.epsilon_constant = is_identically_zero(
        sub(sign(res.sf.lambda1), integer(inv.epsilon)), names, center, plan);
  } else {
    auto canon = canonicalize(sys, plan);
    if (!canon.ok()) return inv;
    inv.kappa = canon.pair->kappa;
    inv.nu = canon.pair->nu;
    inv.epsilon = canon.pair->epsilon;
    inv.epsilon_constant = canon.epsilon_constant;
  }
  if (inv.epsilon == 0 || !inv.epsilon_constant.ok()) return inv;
  detail::normalize_nu(inv, names, center, plan);
  inv.valid = true;
  return inv;
}

struct ModeAgreement {
  CheckResult kappa_agree;
  CheckResult nu_agree;

  bool ok() const { return kappa_agree.ok() && nu_agree.ok(); }
};

// Both routes must produce the same kappa exactly and the same reported nu.
inline ModeAgreement check_mode_agreement(const ControlSystem& sys,
                                          const SamplePlan& plan) {
  ModeAgreement out;
  auto direct = compute_invariants(sys, plan, InvariantMode::kDirect);
  auto canon = compute_invariants(sys, plan, InvariantMode::kViaCanonical);
  if (!direct.ok() || !canon.ok()) return out;
  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();
  out.kappa_agree = is_identically_zero(sub(direct.kappa, canon.kappa), names,
                                        center, plan);
  out.nu_agree =
      is_identically_zero(sub(direct.nu, canon.nu), names, center, plan);
  return out;
}

struct CanonicalRelationReport {
  // Residuals of the canonical-pair relations:
  //   L_{f_c} mu  - nu kappa + L_{g_c} kappa = 0
  //   L_{f_c} nu  - mu = 0
  //   L^2_{f_c} nu - nu kappa + L_{g_c} kappa = 0
  CheckResult mu_relation;
  CheckResult nu_relation;
  CheckResult second_order;
  double max_abs_mu = 0, max_abs_nu = 0, max_abs_second = 0;

  bool pass() const {
    return mu_relation.ok() && nu_relation.ok() && second_order.ok();
  }
};

inline CanonicalRelationReport verify_kappa_nu_relation(
    const CanonicalPair& cp, const std::vector<std::string>& names,
    const std::vector<double>& center, const SamplePlan& plan) {
  Expr r_mu = lie_scalar(cp.f_c, cp.mu) - cp.nu * cp.kappa +
              lie_scalar(cp.g_c, cp.kappa);
  Expr r_nu = lie_scalar(cp.f_c, cp.nu) - cp.mu;
  Expr r_second = lie_derivative(cp.f_c, cp.nu, 2) - cp.nu * cp.kappa +
                  lie_scalar(cp.g_c, cp.kappa);

  CanonicalRelationReport out;
  auto s1 = detail::scan_residual(r_mu, names, center, plan);
  auto s2 = detail::scan_residual(r_nu, names, center, plan);
  auto s3 = detail::scan_residual(r_second, names, center, plan);
  out.mu_relation = s1.check;
  out.nu_relation = s2.check;
  out.second_order = s3.check;
  out.max_abs_mu = s1.max_abs;
  out.max_abs_nu = s2.max_abs;
  out.max_abs_second = s3.max_abs;
  return out;
}

}  // namespace kappanu
