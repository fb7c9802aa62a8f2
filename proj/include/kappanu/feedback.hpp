#pragma once

#include <optional>
#include <vector>

#include "kappanu/structure.hpp"

namespace kappanu {

// Scalar-input feedback (alpha, beta): f -> f + g alpha, g -> g beta.
struct FeedbackTransform {
  Expr alpha;
  Expr beta;
};

inline FeedbackTransform identity_feedback() {
  return {integer(0), integer(1)};
}

// Applying (a1, b1) then (a2, b2) equals applying (a1 + b1 a2, b1 b2).
inline FeedbackTransform compose(const FeedbackTransform& first,
                                 const FeedbackTransform& second) {
  return {add(first.alpha, mul(first.beta, second.alpha)),
          mul(first.beta, second.beta)};
}

// gamma = L_f beta + alpha L_g beta - beta L_g alpha; it is the g-coefficient
// of [f~, g~] in the (g, [f,g]) frame and feeds every transformation law.
inline Expr gamma_of(const FeedbackTransform& t, const ControlSystem& sys) {
  const VectorField& f = sys.f();
  const VectorField& g = sys.g();
  return lie_scalar(f, t.beta) + t.alpha * lie_scalar(g, t.beta) -
         t.beta * lie_scalar(g, t.alpha);
}

struct FeedbackApplication {
  std::optional<ControlSystem> system;
  CheckResult beta_nonvanishing;

  bool ok() const { return system.has_value(); }
};

inline FeedbackApplication apply_feedback(const ControlSystem& sys,
                                          const FeedbackTransform& t,
                                          const SamplePlan& plan) {
  if (sys.inputs() != 1) {
    throw std::invalid_argument("scalar feedback needs m = 1");
  }
  FeedbackApplication out;
  out.beta_nonvanishing = is_nonvanishing(t.beta, sys.chart().names(),
                                          sys.base_point(), plan);
  if (!out.beta_nonvanishing.ok()) return out;
  VectorField f = vf_add(sys.f(), vf_scale(t.alpha, sys.g()));
  VectorField g = vf_scale(t.beta, sys.g());
  out.system = ControlSystem(sys.chart(), f, {g}, sys.base_point());
  return out;
}

// Transformation laws for the six structure functions under (alpha, beta),
// assembled symbolically. Logarithmic derivatives enter as L_X beta / beta,
// which is valid for beta of either sign.
inline StructureFunctions predict_transformed_structure(
    const StructureFunctions& sf, const FeedbackTransform& t,
    const ControlSystem& sys) {
  const VectorField& f = sys.f();
  const VectorField& g = sys.g();
  VectorField gf = lie_bracket(g, f);

  const Expr& a = t.alpha;
  const Expr& b = t.beta;
  Expr gm = gamma_of(t, sys);

  Expr Lf_b = lie_scalar(f, b);
  Expr Lg_b = lie_scalar(g, b);
  Expr Lg_a = lie_scalar(g, a);
  Expr Lg_gm = lie_scalar(g, gm);
  Expr Lf_gm = lie_scalar(f, gm);
  Expr Lgf_a = lie_scalar(gf, a);
  Expr Lgf_b = lie_scalar(gf, b);

  StructureFunctions out;
  out.k3 = div(sf.k3 - a, b);
  out.k2 = sf.k2 - div(Lf_b, b) - div(gm, b) - a * div(Lg_b, b) -
           out.k3 * Lg_b;
  out.k1 = sf.k1 + Lgf_a +
           div(Lf_gm + a * Lg_gm - gm * Lg_a +
                   out.k3 * (b * Lgf_b + b * Lg_gm - gm * Lg_b) + out.k2 * gm,
               b);
  out.lambda1 = b * b * sf.lambda1;
  out.lambda2 = b * sf.lambda2 - b * sf.lambda1 * a + gm * sf.lambda3 -
                Lgf_b - Lg_gm + integer(2) * gm * div(Lg_b, b);
  out.lambda3 = b * sf.lambda3 + Lg_b;
  return out;
}

// Chart-to-itself diffeomorphism given by explicit forward and inverse
// component lists (new coordinates in terms of old, and back).
struct Diffeomorphism {
  std::vector<Expr> forward;
  std::vector<Expr> inverse;
};

struct DiffeoVerification {
  CheckResult forward_then_inverse;  // inverse(forward(xi)) = xi near xi0
  CheckResult inverse_then_forward;  // forward(inverse(x)) = x near phi(xi0)

  bool ok() const {
    return forward_then_inverse.ok() && inverse_then_forward.ok();
  }
};

namespace detail {

inline Substitution bind_chart(const Chart& chart,
                               const std::vector<Expr>& exprs) {
  Substitution s;
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    s.emplace_back(chart.name(i), exprs[i]);
  }
  return s;
}

}  // namespace detail

inline std::optional<std::vector<double>> image_point(
    const Diffeomorphism& d, const Chart& chart,
    const std::vector<double>& point) {
  Env env = make_env(chart.names(), point);
  std::vector<double> out(chart.dim());
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    auto v = evaluate(d.forward[i], env);
    if (!v) return std::nullopt;
    out[i] = *v;
  }
  return out;
}

inline DiffeoVerification verify_diffeomorphism(
    const Diffeomorphism& d, const Chart& chart,
    const std::vector<double>& base_point, const SamplePlan& plan) {
  if (d.forward.size() != chart.dim() || d.inverse.size() != chart.dim()) {
    throw std::invalid_argument("diffeomorphism dimension mismatch");
  }
  DiffeoVerification out;
  Substitution fwd = detail::bind_chart(chart, d.forward);
  Substitution inv = detail::bind_chart(chart, d.inverse);

  std::vector<Expr> round_a(chart.dim()), round_b(chart.dim());
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    round_a[i] = sub(substitute(d.inverse[i], fwd), variable(chart.name(i)));
    round_b[i] = sub(substitute(d.forward[i], inv), variable(chart.name(i)));
  }
  out.forward_then_inverse =
      is_identically_zero(round_a, chart.names(), base_point, plan);
  auto img = image_point(d, chart, base_point);
  if (!img) return out;
  out.inverse_then_forward =
      is_identically_zero(round_b, chart.names(), *img, plan);
  return out;
}

struct PushforwardResult {
  std::optional<ControlSystem> system;
  DiffeoVerification verification;

  bool ok() const { return system.has_value(); }
};

// (phi_* X)^i = (sum_j dphi_i/dxi_j X^j) composed with the inverse.
inline VectorField pushforward_field(const VectorField& X,
                                     const Diffeomorphism& d) {
  const Chart& chart = X.chart();
  Substitution inv = detail::bind_chart(chart, d.inverse);
  std::vector<Expr> comps(chart.dim());
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    Expr acc = integer(0);
    for (std::size_t j = 0; j < chart.dim(); ++j) {
      acc = add(acc, detail::dterm(differentiate(d.forward[i], chart.name(j)),
                                   X.component(j)));
    }
    comps[i] = substitute(acc, inv);
  }
  return VectorField(chart, comps);
}

inline PushforwardResult pushforward(const ControlSystem& sys,
                                     const Diffeomorphism& d,
                                     const SamplePlan& plan) {
  PushforwardResult out;
  out.verification =
      verify_diffeomorphism(d, sys.chart(), sys.base_point(), plan);
  if (!out.verification.ok()) return out;
  auto img = image_point(d, sys.chart(), sys.base_point());
  if (!img) return out;
  VectorField f = pushforward_field(sys.f(), d);
  std::vector<VectorField> gs;
  gs.reserve(sys.inputs());
  for (const VectorField& g : sys.controls()) {
    gs.push_back(pushforward_field(g, d));
  }
  out.system = ControlSystem(sys.chart(), f, gs, *img);
  return out;
}

}  // namespace kappanu
