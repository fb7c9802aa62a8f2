#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kappanu/expr.hpp"

namespace kappanu {

// Numeric checks sample a box around the base point. Defaults are part of the
// reported results; override them per system when a check needs a tighter box.
struct SamplePlan {
  int samples = 64;
  double half_width = 0.5;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_resamples = 256;
  std::uint64_t seed = 42;
};

// Deterministic stream of points in the axis-aligned box
// [center_i - half_width, center_i + half_width]. The same plan and center
// always produce the same stream, independent of platform.
class PointSampler {
 public:
  PointSampler(std::vector<std::string> names, std::vector<double> center,
               const SamplePlan& plan)
      : names_(std::move(names)),
        center_(std::move(center)),
        half_width_(plan.half_width),
        rng_(plan.seed) {}

  std::vector<double> next_point() {
    std::vector<double> p(center_.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      p[j] = center_[j] + (2.0 * u - 1.0) * half_width_;
    }
    return p;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> center_;
  double half_width_;
  std::mt19937_64 rng_;
};

inline Env make_env(const std::vector<std::string>& names,
                    const std::vector<double>& point) {
  Env env;
  for (std::size_t i = 0; i < names.size(); ++i) env.set(names[i], point[i]);
  return env;
}

enum class Verdict : std::uint8_t { kTrue, kFalse, kInconclusive };

struct Witness {
  std::vector<double> point;
  double value;
  double scale;
};

struct CheckResult {
  Verdict verdict = Verdict::kInconclusive;
  std::optional<Witness> witness;  // set when verdict is kFalse
  int evaluated = 0;               // non-singular samples actually used
  int singular = 0;                // singular draws skipped along the way

  bool ok() const { return verdict == Verdict::kTrue; }
};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return "true";
    case Verdict::kFalse: return "false";
    default: return "inconclusive";
  }
}

namespace detail {

// Shared scan: draws until plan.samples good points are seen or the resample
// budget is spent. `accept` gets (point, value, scale) per expression and
// returns false to stop with a kFalse verdict. Conclusive needs good points
// for at least half the requested samples.
template <typename Accept>
CheckResult scan_samples(const std::vector<Expr>& exprs,
                         const std::vector<std::string>& names,
                         const std::vector<double>& center,
                         const SamplePlan& plan, Accept accept) {
  CheckResult out;
  PointSampler sampler(names, center, plan);
  int draws_left = plan.samples + plan.max_resamples;
  while (out.evaluated < plan.samples && draws_left > 0) {
    --draws_left;
    std::vector<double> p = sampler.next_point();
    Env env = make_env(names, p);
    std::vector<EvalResult> vals;
    vals.reserve(exprs.size());
    bool singular = false;
    for (const Expr& e : exprs) {
      auto r = evaluate_scaled(e, env);
      if (!r) {
        singular = true;
        break;
      }
      vals.push_back(*r);
    }
    if (singular) {
      ++out.singular;
      continue;
    }
    ++out.evaluated;
    for (const EvalResult& r : vals) {
      if (!accept(p, r.value, r.scale)) {
        out.verdict = Verdict::kFalse;
        out.witness = Witness{p, r.value, r.scale};
        return out;
      }
    }
  }
  out.verdict = (2 * out.evaluated >= plan.samples) ? Verdict::kTrue
                                                    : Verdict::kInconclusive;
  return out;
}

}  // namespace detail

// All expressions vanish identically on the box (within tolerance) as far as
// sampling can tell. kFalse carries the first violating point and value.
inline CheckResult is_identically_zero(const std::vector<Expr>& exprs,
                                       const std::vector<std::string>& names,
                                       const std::vector<double>& center,
                                       const SamplePlan& plan) {
  return detail::scan_samples(
      exprs, names, center, plan,
      [&plan](const std::vector<double>&, double v, double scale) {
        return std::fabs(v) <= plan.abs_tol + plan.rel_tol * scale;
      });
}

inline CheckResult is_identically_zero(const Expr& e,
                                       const std::vector<std::string>& names,
                                       const std::vector<double>& center,
                                       const SamplePlan& plan) {
  return is_identically_zero(std::vector<Expr>{e}, names, center, plan);
}

// No expression comes within tolerance of zero anywhere on the box.
inline CheckResult is_nonvanishing(const std::vector<Expr>& exprs,
                                   const std::vector<std::string>& names,
                                   const std::vector<double>& center,
                                   const SamplePlan& plan) {
  return detail::scan_samples(
      exprs, names, center, plan,
      [&plan](const std::vector<double>&, double v, double scale) {
        return std::fabs(v) > plan.abs_tol + plan.rel_tol * scale;
      });
}

inline CheckResult is_nonvanishing(const Expr& e,
                                   const std::vector<std::string>& names,
                                   const std::vector<double>& center,
                                   const SamplePlan& plan) {
  return is_nonvanishing(std::vector<Expr>{e}, names, center, plan);
}

// Greatest |value| of e over the good samples; nullopt when every draw was
// singular. Used to normalise residuals against the size of the quantity.
inline std::optional<double> sampled_magnitude(
    const Expr& e, const std::vector<std::string>& names,
    const std::vector<double>& center, const SamplePlan& plan) {
  double best = 0;
  bool seen = false;
  CheckResult r = detail::scan_samples(
      std::vector<Expr>{e}, names, center, plan,
      [&](const std::vector<double>&, double v, double) {
        if (!seen || std::fabs(v) > best) best = std::fabs(v);
        seen = true;
        return true;
      });
  (void)r;
  if (!seen) return std::nullopt;
  return best;
}

}  // namespace kappanu
