#pragma once

#include <stdexcept>
#include <vector>

#include "kappanu/geometry.hpp"

namespace kappanu {

// xi' = f(xi) + sum_i g_i(xi) u_i around the base point.
class ControlSystem {
 public:
  ControlSystem(Chart chart, VectorField f, std::vector<VectorField> controls,
                std::vector<double> base_point)
      : chart_(std::move(chart)),
        f_(std::move(f)),
        controls_(std::move(controls)),
        base_point_(std::move(base_point)) {
    if (controls_.empty()) throw std::invalid_argument("need m >= 1 controls");
    detail::require_same_chart(chart_, f_.chart());
    for (const VectorField& g : controls_) {
      detail::require_same_chart(chart_, g.chart());
    }
    if (base_point_.size() != chart_.dim()) {
      throw std::invalid_argument("base point dimension mismatch");
    }
  }

  const Chart& chart() const { return chart_; }
  const VectorField& f() const { return f_; }
  const std::vector<VectorField>& controls() const { return controls_; }
  const VectorField& g(std::size_t i = 0) const { return controls_[i]; }
  std::size_t inputs() const { return controls_.size(); }
  const std::vector<double>& base_point() const { return base_point_; }

 private:
  Chart chart_;
  VectorField f_;
  std::vector<VectorField> controls_;
  std::vector<double> base_point_;
};

namespace detail {

inline void require_single_input_3d(const ControlSystem& sys) {
  if (sys.chart().dim() != 3 || sys.inputs() != 1) {
    throw std::invalid_argument("analysis needs n = 3 and m = 1");
  }
}

}  // namespace detail

struct AssumptionReport {
  CheckResult a1;  // det(f, g, [g,f]) nonvanishing
  CheckResult a2;  // det(g, [g,f], [g,[g,f]]) nonvanishing

  bool pass() const { return a1.ok() && a2.ok(); }
};

inline AssumptionReport check_assumptions(const ControlSystem& sys,
                                          const SamplePlan& plan) {
  detail::require_single_input_3d(sys);
  const VectorField& f = sys.f();
  const VectorField& g = sys.g();
  VectorField gf = lie_bracket(g, f);
  VectorField ggf = lie_bracket(g, gf);
  AssumptionReport out;
  out.a1 = is_nonvanishing(det_of_columns({f, g, gf}), sys.chart().names(),
                           sys.base_point(), plan);
  out.a2 = is_nonvanishing(det_of_columns({g, gf, ggf}), sys.chart().names(),
                           sys.base_point(), plan);
  return out;
}

// Coefficients of the two frame decompositions
//   [f,[f,g]] = k1 g + k2 [g,f] + k3 [g,[g,f]]
//   [g,[g,f]] = l1 f + l2 g + l3 [g,f]
struct StructureFunctions {
  Expr k1, k2, k3;
  Expr lambda1, lambda2, lambda3;
};

struct StructureResult {
  StructureFunctions sf;
  FrameDecomposition k_decomposition;
  FrameDecomposition lambda_decomposition;

  bool ok() const { return k_decomposition.ok() && lambda_decomposition.ok(); }
};

inline StructureResult compute_structure_functions(const ControlSystem& sys,
                                                   const SamplePlan& plan) {
  detail::require_single_input_3d(sys);
  const VectorField& f = sys.f();
  const VectorField& g = sys.g();
  VectorField gf = lie_bracket(g, f);
  VectorField ggf = lie_bracket(g, gf);
  VectorField ffg = lie_bracket(f, lie_bracket(f, g));

  StructureResult out;
  out.k_decomposition =
      decompose_in_frame(ffg, {g, gf, ggf}, sys.base_point(), plan);
  out.lambda_decomposition =
      decompose_in_frame(ggf, {f, g, gf}, sys.base_point(), plan);
  if (!out.k_decomposition.coefficients.empty()) {
    out.sf.k1 = out.k_decomposition.coefficients[0];
    out.sf.k2 = out.k_decomposition.coefficients[1];
    out.sf.k3 = out.k_decomposition.coefficients[2];
  }
  if (!out.lambda_decomposition.coefficients.empty()) {
    out.sf.lambda1 = out.lambda_decomposition.coefficients[0];
    out.sf.lambda2 = out.lambda_decomposition.coefficients[1];
    out.sf.lambda3 = out.lambda_decomposition.coefficients[2];
  }
  return out;
}

struct RelationReport {
  // Residuals of the three compatibility relations tying the k's to the
  // lambda's, each checked to vanish identically on the box.
  CheckResult first, second, third;
  double max_abs_first = 0, max_abs_second = 0, max_abs_third = 0;

  bool pass() const { return first.ok() && second.ok() && third.ok(); }
};

namespace detail {

struct ResidualScan {
  CheckResult check;
  double max_abs = 0;
};

inline ResidualScan scan_residual(const std::vector<Expr>& residuals,
                                  const std::vector<std::string>& names,
                                  const std::vector<double>& center,
                                  const SamplePlan& plan) {
  ResidualScan out;
  out.check = detail::scan_samples(
      residuals, names, center, plan,
      [&](const std::vector<double>&, double v, double scale) {
        if (std::fabs(v) > out.max_abs) out.max_abs = std::fabs(v);
        return std::fabs(v) <= plan.abs_tol + plan.rel_tol * scale;
      });
  return out;
}

inline ResidualScan scan_residual(const Expr& residual,
                                  const std::vector<std::string>& names,
                                  const std::vector<double>& center,
                                  const SamplePlan& plan) {
  return scan_residual(std::vector<Expr>{residual}, names, center, plan);
}

}  // namespace detail

inline RelationReport verify_structure_relations(const StructureFunctions& sf,
                                                 const ControlSystem& sys,
                                                 const SamplePlan& plan) {
  detail::require_single_input_3d(sys);
  const VectorField& f = sys.f();
  const VectorField& g = sys.g();

  Expr r1 = lie_scalar(f, sf.lambda1) + sf.k2 * sf.lambda1 +
            lie_scalar(g, sf.lambda1 * sf.k3);
  Expr r2 = lie_scalar(f, sf.lambda2) - sf.lambda3 * sf.k1 +
            lie_scalar(g, sf.k1) + sf.k2 * sf.lambda2 +
            lie_scalar(g, sf.lambda2 * sf.k3);
  Expr r3 = lie_scalar(f, sf.lambda3) - sf.lambda2 + sf.k3 * sf.lambda1 +
            lie_scalar(g, sf.k2) + lie_scalar(g, sf.lambda3 * sf.k3);

  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();
  RelationReport out;
  auto s1 = detail::scan_residual(r1, names, center, plan);
  auto s2 = detail::scan_residual(r2, names, center, plan);
  auto s3 = detail::scan_residual(r3, names, center, plan);
  out.first = s1.check;
  out.second = s2.check;
  out.third = s3.check;
  out.max_abs_first = s1.max_abs;
  out.max_abs_second = s2.max_abs;
  out.max_abs_third = s3.max_abs;
  return out;
}

}  // namespace kappanu
