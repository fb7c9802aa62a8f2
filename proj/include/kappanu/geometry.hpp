#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "kappanu/expr.hpp"
#include "kappanu/sample.hpp"

namespace kappanu {

class Chart {
 public:
  explicit Chart(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw std::invalid_argument("chart needs a variable");
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) {
      throw std::invalid_argument("chart variables must be unique");
    }
  }

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  std::optional<std::size_t> index(std::string_view v) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == v) return i;
    }
    return std::nullopt;
  }

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.names_ == b.names_;
  }
  friend bool operator!=(const Chart& a, const Chart& b) { return !(a == b); }

 private:
  std::vector<std::string> names_;
};

class VectorField {
 public:
  VectorField(Chart chart, std::vector<Expr> components)
      : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_.dim()) {
      throw std::invalid_argument("component count must match chart dimension");
    }
  }

  const Chart& chart() const { return chart_; }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& component(std::size_t i) const { return components_[i]; }
  std::size_t dim() const { return components_.size(); }

 private:
  Chart chart_;
  std::vector<Expr> components_;
};

namespace detail {

inline void require_same_chart(const Chart& a, const Chart& b) {
  if (a != b) throw std::invalid_argument("chart mismatch");
}

}  // namespace detail

inline VectorField vf_zero(const Chart& chart) {
  return VectorField(chart, std::vector<Expr>(chart.dim(), integer(0)));
}

inline VectorField vf_add(const VectorField& a, const VectorField& b) {
  detail::require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    c[i] = add(a.component(i), b.component(i));
  }
  return VectorField(a.chart(), std::move(c));
}

inline VectorField vf_sub(const VectorField& a, const VectorField& b) {
  detail::require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    c[i] = sub(a.component(i), b.component(i));
  }
  return VectorField(a.chart(), std::move(c));
}

inline VectorField vf_scale(const Expr& s, const VectorField& a) {
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    c[i] = detail::dterm(s, a.component(i));
  }
  return VectorField(a.chart(), std::move(c));
}

inline VectorField vf_neg(const VectorField& a) {
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = neg(a.component(i));
  return VectorField(a.chart(), std::move(c));
}

// L_f h = sum_j f^j dh/dxi_j
inline Expr lie_scalar(const VectorField& f, const Expr& h) {
  Expr acc = integer(0);
  for (std::size_t j = 0; j < f.dim(); ++j) {
    acc = add(acc, detail::dterm(f.component(j),
                                 differentiate(h, f.chart().name(j))));
  }
  return acc;
}

inline Expr lie_derivative(const VectorField& f, const Expr& h, int order) {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  Expr acc = h;
  for (int i = 0; i < order; ++i) acc = lie_scalar(f, acc);
  return acc;
}

// [f,g]^i = L_f g^i - L_g f^i
inline VectorField lie_bracket(const VectorField& f, const VectorField& g) {
  detail::require_same_chart(f.chart(), g.chart());
  std::vector<Expr> c(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) {
    c[i] = sub(lie_scalar(f, g.component(i)), lie_scalar(g, f.component(i)));
  }
  return VectorField(f.chart(), std::move(c));
}

// Row of partials (dh/dxi_1, ..., dh/dxi_n).
inline std::vector<Expr> differential(const Expr& h, const Chart& chart) {
  std::vector<Expr> row(chart.dim());
  for (std::size_t j = 0; j < chart.dim(); ++j) {
    row[j] = differentiate(h, chart.name(j));
  }
  return row;
}

namespace detail {

// Cofactor expansion along the first remaining column; zero entries prune
// whole subtrees, which keeps determinants of sparse frames small.
inline Expr det_rec(const std::vector<std::vector<Expr>>& m,
                    std::vector<std::size_t> rows, std::size_t col) {
  if (rows.size() == 1) return m[rows[0]][col];
  Expr acc = integer(0);
  bool flip = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Expr& pivot = m[rows[r]][col];
    if (!pivot.is_zero()) {
      std::vector<std::size_t> rest;
      rest.reserve(rows.size() - 1);
      for (std::size_t q = 0; q < rows.size(); ++q) {
        if (q != r) rest.push_back(rows[q]);
      }
      Expr minor = det_rec(m, std::move(rest), col + 1);
      Expr term = dterm(pivot, minor);
      acc = flip ? sub(acc, term) : add(acc, term);
    }
    flip = !flip;
  }
  return acc;
}

}  // namespace detail

// Determinant of the matrix whose columns are the given fields.
inline Expr det_of_columns(const std::vector<VectorField>& fields) {
  if (fields.empty()) throw std::invalid_argument("empty field list");
  const Chart& chart = fields[0].chart();
  std::size_t n = chart.dim();
  if (fields.size() != n) {
    throw std::invalid_argument("need exactly n fields for a determinant");
  }
  std::vector<std::vector<Expr>> m(n, std::vector<Expr>(n));
  for (std::size_t j = 0; j < n; ++j) {
    detail::require_same_chart(chart, fields[j].chart());
    for (std::size_t i = 0; i < n; ++i) m[i][j] = fields[j].component(i);
  }
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return detail::det_rec(m, std::move(rows), 0);
}

struct FrameDecomposition {
  std::vector<Expr> coefficients;  // empty when the frame is singular
  CheckResult frame_nonsingular;
  CheckResult residual_zero;

  bool ok() const {
    return frame_nonsingular.ok() && residual_zero.ok() &&
           !coefficients.empty();
  }
};

// Coefficients c with v = sum c_i frame_i, by Cramer's rule. The coefficients
// are symbolic quotients of determinants, so callers can differentiate them.
inline FrameDecomposition decompose_in_frame(
    const VectorField& v, const std::vector<VectorField>& frame,
    const std::vector<double>& center, const SamplePlan& plan) {
  FrameDecomposition out;
  Expr D = det_of_columns(frame);
  const Chart& chart = v.chart();
  out.frame_nonsingular = is_nonvanishing(D, chart.names(), center, plan);
  if (!out.frame_nonsingular.ok()) return out;

  std::size_t n = chart.dim();
  out.coefficients.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<VectorField> cols = frame;
    cols[i] = v;
    out.coefficients.push_back(div(det_of_columns(cols), D));
  }

  VectorField recombined = vf_zero(chart);
  for (std::size_t i = 0; i < n; ++i) {
    recombined = vf_add(recombined, vf_scale(out.coefficients[i], frame[i]));
  }
  out.residual_zero = is_identically_zero(
      vf_sub(v, recombined).components(), chart.names(), center, plan);
  return out;
}

struct RankResult {
  int rank = -1;          // maximum rank over good samples
  bool constant = false;  // rank identical at every good sample
  Verdict verdict = Verdict::kInconclusive;
  int evaluated = 0;
  int singular = 0;
};

// Numeric rank of the matrix whose rows are the given expression rows,
// sampled over the box. Singular values below 1e-8 * (largest + 1) count
// as zero.
inline RankResult sampled_rank(const std::vector<std::vector<Expr>>& rows,
                               const std::vector<std::string>& names,
                               const std::vector<double>& center,
                               const SamplePlan& plan) {
  RankResult out;
  if (rows.empty()) return out;
  std::size_t ncols = rows[0].size();
  PointSampler sampler(names, center, plan);
  int draws_left = plan.samples + plan.max_resamples;
  bool first = true;
  while (out.evaluated < plan.samples && draws_left > 0) {
    --draws_left;
    Env env = make_env(names, sampler.next_point());
    Eigen::MatrixXd m(rows.size(), ncols);
    bool bad = false;
    for (std::size_t i = 0; i < rows.size() && !bad; ++i) {
      for (std::size_t j = 0; j < ncols && !bad; ++j) {
        auto val = evaluate(rows[i][j], env);
        if (!val) bad = true;
        else m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *val;
      }
    }
    if (bad) {
      ++out.singular;
      continue;
    }
    ++out.evaluated;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    double tol = 1e-8 * (sv.size() > 0 ? sv(0) + 1.0 : 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol) ++rank;
    }
    if (first) {
      out.rank = rank;
      out.constant = true;
      first = false;
    } else {
      if (rank != out.rank) out.constant = false;
      if (rank > out.rank) out.rank = rank;
    }
  }
  out.verdict = (2 * out.evaluated >= plan.samples) ? Verdict::kTrue
                                                    : Verdict::kInconclusive;
  return out;
}

inline RankResult sampled_rank(const std::vector<VectorField>& fields,
                               const std::vector<double>& center,
                               const SamplePlan& plan) {
  if (fields.empty()) return RankResult{};
  std::vector<std::vector<Expr>> rows;
  rows.reserve(fields.size());
  for (const VectorField& f : fields) rows.push_back(f.components());
  return sampled_rank(rows, fields[0].chart().names(), center, plan);
}

}  // namespace kappanu
