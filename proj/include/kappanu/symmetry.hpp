#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kappanu/structure.hpp"

namespace kappanu {

// A vector field v is an infinitesimal symmetry of (f, g) when both [v, f]
// and every [v, g_i] stay inside the input span G pointwise.  Membership is
// tested as rank non-increase of {g_1..g_m, bracket} under the constant-rank
// precondition on G.
struct SymmetryCandidate {
  VectorField v;
  std::string label;
};

struct SymmetryCheck {
  bool applicable = false;  // G has constant conclusive sampled rank m
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::string> failures;  // brackets that leave the span

  bool yes() const { return applicable && verdict == Verdict::kTrue; }
  bool no() const { return applicable && verdict == Verdict::kFalse; }
};

namespace detail {

inline bool rank_stays(const RankResult& r, int m) {
  return r.verdict == Verdict::kTrue && r.constant && r.rank == m;
}

// Rank of {inputs..., extra} compared against rank m of the inputs alone.
inline Verdict span_membership(const std::vector<VectorField>& inputs,
                               const VectorField& extra, int m,
                               const std::vector<double>& center,
                               const SamplePlan& plan) {
  std::vector<VectorField> joined = inputs;
  joined.push_back(extra);
  RankResult r = sampled_rank(joined, center, plan);
  if (r.verdict == Verdict::kInconclusive) return Verdict::kInconclusive;
  return (r.constant && r.rank == m) ? Verdict::kTrue : Verdict::kFalse;
}

}  // namespace detail

inline SymmetryCheck is_infinitesimal_symmetry(const ControlSystem& sys,
                                               const SymmetryCandidate& cand,
                                               const SamplePlan& plan) {
  if (!(cand.v.chart() == sys.chart())) {
    throw std::invalid_argument("symmetry candidate chart mismatch");
  }
  SymmetryCheck out;
  const auto& center = sys.base_point();
  int m = static_cast<int>(sys.controls().size());

  RankResult base = sampled_rank(sys.controls(), center, plan);
  if (!detail::rank_stays(base, m)) return out;
  out.applicable = true;

  std::vector<std::pair<std::string, VectorField>> brackets;
  brackets.emplace_back("[v,f]", lie_bracket(cand.v, sys.f()));
  for (std::size_t i = 0; i < sys.controls().size(); ++i) {
    brackets.emplace_back("[v,g" + std::to_string(i + 1) + "]",
                          lie_bracket(cand.v, sys.controls()[i]));
  }

  out.verdict = Verdict::kTrue;
  for (const auto& [label, br] : brackets) {
    Verdict v = detail::span_membership(sys.controls(), br, m, center, plan);
    if (v == Verdict::kFalse) {
      out.verdict = Verdict::kFalse;
      out.failures.push_back(label);
    } else if (v == Verdict::kInconclusive &&
               out.verdict != Verdict::kFalse) {
      out.verdict = Verdict::kInconclusive;
    }
  }
  return out;
}

// Certificate of local straightenability: an involutive constant-rank input
// span plus n-m pairwise-commuting symmetries transversal to it at the base
// point.
struct AbelianTrivialisationReport {
  bool applicable = false;  // G constant conclusive rank m
  RankResult input_rank;
  Verdict involutive = Verdict::kInconclusive;
  std::vector<std::string> involutive_failures;
  CheckResult commuting;
  std::vector<SymmetryCheck> symmetry_checks;
  std::optional<int> base_point_rank;  // of candidates + inputs at the base
  bool transversal = false;
  Verdict verdict = Verdict::kInconclusive;

  bool yes() const { return applicable && verdict == Verdict::kTrue; }
  bool no() const { return applicable && verdict == Verdict::kFalse; }
};

inline AbelianTrivialisationReport check_abelian_trivialisation(
    const ControlSystem& sys, const std::vector<SymmetryCandidate>& candidates,
    const SamplePlan& plan) {
  std::size_t n = sys.chart().dim();
  std::size_t m = sys.controls().size();
  if (candidates.size() != n - m) {
    throw std::invalid_argument("expected n-m symmetry candidates");
  }
  AbelianTrivialisationReport out;
  const auto& center = sys.base_point();

  out.input_rank = sampled_rank(sys.controls(), center, plan);
  if (!detail::rank_stays(out.input_rank, static_cast<int>(m))) return out;
  out.applicable = true;

  out.involutive = Verdict::kTrue;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      VectorField br = lie_bracket(sys.controls()[i], sys.controls()[j]);
      Verdict v = detail::span_membership(sys.controls(), br,
                                          static_cast<int>(m), center, plan);
      if (v == Verdict::kFalse) {
        out.involutive = Verdict::kFalse;
        out.involutive_failures.push_back("[g" + std::to_string(i + 1) +
                                          ",g" + std::to_string(j + 1) + "]");
      } else if (v == Verdict::kInconclusive &&
                 out.involutive != Verdict::kFalse) {
        out.involutive = Verdict::kInconclusive;
      }
    }
  }

  std::vector<Expr> pair_brackets;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      VectorField br = lie_bracket(candidates[i].v, candidates[j].v);
      for (const Expr& c : br.components()) pair_brackets.push_back(c);
    }
  }
  if (pair_brackets.empty()) {
    out.commuting.verdict = Verdict::kTrue;
  } else {
    out.commuting = is_identically_zero(pair_brackets, sys.chart().names(),
                                        center, plan);
  }

  for (const auto& cand : candidates) {
    out.symmetry_checks.push_back(is_infinitesimal_symmetry(sys, cand, plan));
  }

  Env env = make_env(sys.chart().names(), center);
  Eigen::MatrixXd at_base(candidates.size() + m, n);
  bool base_ok = true;
  auto fill_row = [&](Eigen::Index row, const VectorField& field) {
    for (std::size_t j = 0; j < n && base_ok; ++j) {
      auto val = evaluate(field.components()[j], env);
      if (!val) base_ok = false;
      else at_base(row, static_cast<Eigen::Index>(j)) = *val;
    }
  };
  Eigen::Index row = 0;
  for (const auto& cand : candidates) fill_row(row++, cand.v);
  for (const auto& g : sys.controls()) fill_row(row++, g);
  if (base_ok) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(at_base);
    const auto& sv = svd.singularValues();
    double tol = 1e-8 * (sv.size() > 0 ? sv(0) + 1.0 : 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol) ++rank;
    }
    out.base_point_rank = rank;
    out.transversal = rank == static_cast<int>(n);
  }

  Verdict combined = Verdict::kTrue;
  auto fold = [&combined](Verdict v) {
    if (v == Verdict::kFalse) combined = Verdict::kFalse;
    else if (v == Verdict::kInconclusive && combined != Verdict::kFalse)
      combined = Verdict::kInconclusive;
  };
  fold(out.involutive);
  fold(out.commuting.verdict);
  for (const auto& sc : out.symmetry_checks) {
    fold(sc.applicable ? sc.verdict : Verdict::kInconclusive);
  }
  if (!out.base_point_rank) fold(Verdict::kInconclusive);
  else if (!out.transversal) fold(Verdict::kFalse);
  out.verdict = combined;
  return out;
}

// Rank test for systems already presented as x_i' = h_i(x, w), w_j' = u_j.
// The chart lists the n-m state names first and the m control names last.
// k is read off the span of {g_j, [f, g_j]}; the verdict compares it with
// the rank of the differentials dh_1..dh_{n-m}.
struct SigmaTRankReport {
  bool applicable = false;  // span rank constant and conclusive
  int m = 0;
  int k = -1;
  RankResult extended_span_rank;  // {g_j, [f,g_j]}, expected m + k
  RankResult differential_rank;   // {dh_i}
  RankResult control_jacobian_rank;  // dH/dw
  bool equivalent_form_agrees = false;
  Verdict verdict = Verdict::kInconclusive;

  bool yes() const { return applicable && verdict == Verdict::kTrue; }
  bool no() const { return applicable && verdict == Verdict::kFalse; }
};

inline SigmaTRankReport check_rank_condition_sigmaT(
    const std::vector<Expr>& h, const Chart& chart,
    const std::vector<double>& center, const SamplePlan& plan) {
  std::size_t n = chart.dim();
  if (h.empty() || h.size() >= n) {
    throw std::invalid_argument("need 1 <= #h < chart dimension");
  }
  std::size_t m = n - h.size();
  SigmaTRankReport out;
  out.m = static_cast<int>(m);

  std::vector<Expr> f_comps(n, integer(0));
  for (std::size_t i = 0; i < h.size(); ++i) f_comps[i] = h[i];
  VectorField f(chart, f_comps);

  std::vector<VectorField> span;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Expr> comps(n, integer(0));
    comps[h.size() + j] = integer(1);
    span.emplace_back(chart, comps);
  }
  std::size_t input_count = span.size();
  for (std::size_t j = 0; j < input_count; ++j) {
    span.push_back(lie_bracket(f, span[j]));
  }

  out.extended_span_rank = sampled_rank(span, center, plan);
  if (out.extended_span_rank.verdict != Verdict::kTrue ||
      !out.extended_span_rank.constant) {
    return out;
  }
  out.applicable = true;
  out.k = out.extended_span_rank.rank - static_cast<int>(m);

  std::vector<std::vector<Expr>> diff_rows;
  std::vector<std::vector<Expr>> dw_rows;
  for (const Expr& hi : h) {
    std::vector<Expr> full;
    std::vector<Expr> controls_only;
    for (std::size_t j = 0; j < n; ++j) {
      Expr d = differentiate(hi, chart.name(j));
      full.push_back(d);
      if (j >= h.size()) controls_only.push_back(d);
    }
    diff_rows.push_back(std::move(full));
    dw_rows.push_back(std::move(controls_only));
  }
  out.differential_rank = sampled_rank(diff_rows, chart.names(), center, plan);
  out.control_jacobian_rank =
      sampled_rank(dw_rows, chart.names(), center, plan);

  if (out.differential_rank.verdict == Verdict::kInconclusive ||
      out.control_jacobian_rank.verdict == Verdict::kInconclusive) {
    out.verdict = Verdict::kInconclusive;
    return out;
  }
  out.equivalent_form_agrees =
      out.differential_rank.constant && out.control_jacobian_rank.constant &&
      out.differential_rank.rank == out.control_jacobian_rank.rank;
  out.verdict = (out.differential_rank.constant &&
                 out.differential_rank.rank == out.k)
                    ? Verdict::kTrue
                    : Verdict::kFalse;
  return out;
}

// Presentation of an almost abelian symmetry algebra: an abelian ideal
// v_1..v_p plus a distinguished generator v_0 (listed last) acting on the
// ideal by the claimed constant-coefficient table
//   [v_0, v_i] = sum_j action[i][j] v_j.
struct AlgebraPresentation {
  std::vector<VectorField> generators;
  std::vector<std::vector<Number>> action;
  // Order of tangency for presentations built from w^k profiles; enables
  // the exact eigenvalue integrality test.
  std::optional<int> power;
};

// For eigenvalues (lambda_1, ..., lambda_p) and order k every ratio
// k*lambda_i/lambda_1 must be a positive integer at least k.  Returns the
// violated constraint, spelled out, or nothing when all hold.
inline std::optional<std::string> check_eigenvalue_integrality(
    const std::vector<Number>& eigenvalues, int k) {
  if (eigenvalues.empty() || k < 1) {
    throw std::invalid_argument("need eigenvalues and k >= 1");
  }
  for (const Number& e : eigenvalues) {
    if (!e.exact()) {
      throw std::invalid_argument("eigenvalues must be exact rationals");
    }
  }
  const Number& first = eigenvalues[0];
  if (first.is_zero()) return "lambda_1 = 0 violates lambda_1 != 0";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    Number scaled = Number::mul(Number::from_int(k), eigenvalues[i]);
    Number ratio = Number::div(scaled, first);
    std::string name = "k*lambda_" + std::to_string(i + 1) + "/lambda_1";
    std::string value = ratio.str();
    if (!ratio.is_integer()) {
      return name + " = " + value + " violates " + name + " in Z";
    }
    if (ratio.is_negative() || ratio.is_zero()) {
      return name + " = " + value + " violates " + name + " > 0";
    }
    Number excess = Number::add(ratio, Number::from_int(-k));
    if (excess.is_negative()) {
      return name + " = " + value + " violates " + name + " >= k = " +
             std::to_string(k);
    }
  }
  return std::nullopt;
}

struct AlgebraVerification {
  CheckResult bracket_table;   // claimed [v_0, v_i] relations
  CheckResult ideal_abelian;   // [v_i, v_j] = 0 inside the ideal
  bool integrality_ok = true;  // only examined when a power is supplied
  std::optional<std::string> integrality_violation;

  bool ok() const {
    return bracket_table.ok() && ideal_abelian.ok() && integrality_ok;
  }
};

inline AlgebraVerification verify_algebra_presentation(
    const AlgebraPresentation& a, const std::vector<double>& center,
    const SamplePlan& plan) {
  if (a.generators.size() < 2) {
    throw std::invalid_argument("presentation needs an ideal and v_0");
  }
  std::size_t p = a.generators.size() - 1;
  if (a.action.size() != p) {
    throw std::invalid_argument("action table rows must match ideal size");
  }
  for (const auto& row : a.action) {
    if (row.size() != p) {
      throw std::invalid_argument("action table columns must match ideal size");
    }
  }
  const Chart& chart = a.generators[0].chart();
  const VectorField& v0 = a.generators.back();

  AlgebraVerification out;
  std::vector<Expr> table_residuals;
  for (std::size_t i = 0; i < p; ++i) {
    VectorField lhs = lie_bracket(v0, a.generators[i]);
    VectorField rhs = vf_zero(chart);
    for (std::size_t j = 0; j < p; ++j) {
      if (a.action[i][j].is_zero()) continue;
      rhs = vf_add(rhs, vf_scale(constant(a.action[i][j]), a.generators[j]));
    }
    VectorField res = vf_sub(lhs, rhs);
    for (const Expr& c : res.components()) table_residuals.push_back(c);
  }
  out.bracket_table =
      is_identically_zero(table_residuals, chart.names(), center, plan);

  std::vector<Expr> ideal_residuals;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      VectorField br = lie_bracket(a.generators[i], a.generators[j]);
      for (const Expr& c : br.components()) ideal_residuals.push_back(c);
    }
  }
  if (ideal_residuals.empty()) {
    out.ideal_abelian.verdict = Verdict::kTrue;
  } else {
    out.ideal_abelian =
        is_identically_zero(ideal_residuals, chart.names(), center, plan);
  }

  if (a.power) {
    std::vector<Number> eigenvalues;
    eigenvalues.reserve(p);
    for (std::size_t i = 0; i < p; ++i) eigenvalues.push_back(a.action[i][i]);
    out.integrality_violation =
        check_eigenvalue_integrality(eigenvalues, *a.power);
    out.integrality_ok = !out.integrality_violation.has_value();
  }
  return out;
}

}  // namespace kappanu
