#pragma once

// Analysis reports: run the structure/invariants/classification pipeline on
// a loaded system and render the result as ordered JSON or plain text. The
// JSON is deterministic: fixed key order, fixed witness order, and all
// numerals emitted through the same serializer.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kappanu/classify.hpp"
#include "kappanu/symmetry.hpp"

namespace kappanu {

using Json = nlohmann::ordered_json;

inline Json check_to_json(const CheckResult& c) {
  Json j;
  j["verdict"] = verdict_name(c.verdict);
  j["evaluated"] = c.evaluated;
  j["singular"] = c.singular;
  if (c.witness) {
    Json w;
    w["point"] = c.witness->point;
    w["value"] = c.witness->value;
    j["witness"] = w;
  }
  return j;
}

namespace detail {

inline void collect_witness(Json& arr, const char* name,
                            const CheckResult& c) {
  if (c.verdict != Verdict::kFalse || !c.witness) return;
  Json w;
  w["check"] = name;
  w["point"] = c.witness->point;
  w["value"] = c.witness->value;
  arr.push_back(w);
}

inline Json value_at(const Expr& e, const std::vector<std::string>& names,
                     const std::vector<double>& center) {
  Env env = make_env(names, center);
  auto v = evaluate(e, env);
  if (!v) return nullptr;
  return *v;
}

}  // namespace detail

struct AnalyzeOutcome {
  Json report;
  int exit_code = 0;  // 0 analyzed, 2 assumptions failed, 3 inconclusive
};

// Systems outside the n = 3, m = 1 scope get distribution diagnostics
// instead of the invariant pipeline.
inline AnalyzeOutcome analyze_system(const ControlSystem& sys,
                                     const SamplePlan& plan) {
  AnalyzeOutcome out;
  Json& j = out.report;
  const auto& names = sys.chart().names();
  const auto& center = sys.base_point();
  j["vars"] = names;
  j["base"] = center;
  j["plan"] = Json{{"samples", plan.samples},
                   {"half_width", plan.half_width},
                   {"abs_tol", plan.abs_tol},
                   {"rel_tol", plan.rel_tol},
                   {"max_resamples", plan.max_resamples},
                   {"seed", plan.seed}};

  if (sys.chart().dim() != 3 || sys.inputs() != 1) {
    j["pipeline"] = "symmetry-only";
    RankResult g_rank = sampled_rank(sys.controls(), center, plan);
    j["input_rank"] = Json{{"rank", g_rank.rank},
                           {"constant", g_rank.constant},
                           {"evaluated", g_rank.evaluated}};
    std::vector<VectorField> extended = sys.controls();
    for (const VectorField& g : sys.controls()) {
      extended.push_back(lie_bracket(sys.f(), g));
    }
    RankResult e_rank = sampled_rank(extended, center, plan);
    j["extended_rank"] = Json{{"rank", e_rank.rank},
                              {"constant", e_rank.constant},
                              {"evaluated", e_rank.evaluated}};
    j["note"] =
        "invariant pipeline needs 3 states and 1 input; "
        "use the symmetry command for candidate checks";
    out.exit_code = 0;
    return out;
  }
  j["pipeline"] = "invariants";

  ClassificationReport rep = classify_family(sys, plan);
  Json witnesses = Json::array();

  Json assumptions;
  assumptions["a1"] = check_to_json(rep.assumptions.a1);
  assumptions["a2"] = check_to_json(rep.assumptions.a2);
  assumptions["pass"] = rep.assumptions.pass();
  j["assumptions"] = assumptions;
  detail::collect_witness(witnesses, "a1", rep.assumptions.a1);
  detail::collect_witness(witnesses, "a2", rep.assumptions.a2);

  if (!rep.assumptions.pass()) {
    j["witnesses"] = witnesses;
    out.exit_code = 2;
    return out;
  }

  StructureResult sr = compute_structure_functions(sys, plan);
  Json structure;
  const Expr* fns[6] = {&sr.sf.k1, &sr.sf.k2, &sr.sf.k3,
                        &sr.sf.lambda1, &sr.sf.lambda2, &sr.sf.lambda3};
  const char* fn_names[6] = {"k1", "k2", "k3", "lambda1", "lambda2",
                             "lambda3"};
  for (int i = 0; i < 6; ++i) {
    structure[fn_names[i]] = to_string(*fns[i]);
  }
  Json at_base;
  for (int i = 0; i < 6; ++i) {
    at_base[fn_names[i]] = detail::value_at(*fns[i], names, center);
  }
  structure["at_base"] = at_base;
  j["structure"] = structure;

  Json invariants;
  invariants["eps"] = rep.invariants.epsilon;
  invariants["kappa"] = to_string(rep.invariants.kappa);
  invariants["nu"] = to_string(rep.invariants.nu);
  invariants["nu_sign"] = rep.invariants.nu_sign;
  invariants["nu_convention"] = rep.invariants.nu_convention;
  Json inv_base;
  inv_base["kappa"] = detail::value_at(rep.invariants.kappa, names, center);
  inv_base["nu"] = detail::value_at(rep.invariants.nu, names, center);
  invariants["at_base"] = inv_base;
  j["invariants"] = invariants;

  Json triv;
  triv["verdict"] = rep.trivialisable.applicable
                        ? verdict_name(rep.trivialisable.verdict)
                        : "inconclusive";
  triv["route"] =
      rep.trivialisable.route_used == TrivialisabilityRoute::kCanonical
          ? "canonical"
          : "raw";
  triv["kappa_zero"] = check_to_json(rep.trivialisable.kappa_zero);
  triv["nu_along_drift"] = check_to_json(rep.trivialisable.nu_along_drift);
  triv["nu_along_bracket"] =
      check_to_json(rep.trivialisable.nu_along_bracket);
  j["trivialisable"] = triv;
  detail::collect_witness(witnesses, "kappa_zero",
                          rep.trivialisable.kappa_zero);
  detail::collect_witness(witnesses, "nu_along_drift",
                          rep.trivialisable.nu_along_drift);
  detail::collect_witness(witnesses, "nu_along_bracket",
                          rep.trivialisable.nu_along_bracket);

  j["family"] = family_name(rep.family);
  j["family_resolved"] = rep.family_resolved;
  detail::collect_witness(witnesses, "kappa_zero_gate", rep.kappa_zero);
  detail::collect_witness(witnesses, "nu_zero_gate", rep.nu_zero);
  j["witnesses"] = witnesses;

  bool definite = rep.family_resolved && rep.invariants.ok() &&
                  (rep.trivialisable.yes() || rep.trivialisable.no());
  out.exit_code = definite ? 0 : 3;
  return out;
}

inline std::string render_text(const Json& j) {
  std::ostringstream out;
  auto vars = j["vars"].get<std::vector<std::string>>();
  out << "chart:";
  for (const auto& v : vars) out << " " << v;
  out << "\n";
  if (j["pipeline"] == "symmetry-only") {
    out << "pipeline: symmetry-only\n";
    out << "input rank: " << j["input_rank"]["rank"]
        << "  extended rank: " << j["extended_rank"]["rank"] << "\n";
    out << j["note"].get<std::string>() << "\n";
    return out.str();
  }
  const Json& a = j["assumptions"];
  out << "assumptions: A1 " << a["a1"]["verdict"].get<std::string>()
      << ", A2 " << a["a2"]["verdict"].get<std::string>()
      << (a["pass"].get<bool>() ? " (pass)" : " (fail)") << "\n";
  if (!a["pass"].get<bool>()) return out.str();
  const Json& s = j["structure"];
  for (const char* name :
       {"k1", "k2", "k3", "lambda1", "lambda2", "lambda3"}) {
    out << name << " = " << s[name].get<std::string>() << "  [base "
        << s["at_base"][name].dump() << "]\n";
  }
  const Json& inv = j["invariants"];
  out << "invariants: eps = " << inv["eps"] << ", kappa = "
      << inv["kappa"].get<std::string>() << "  [base "
      << inv["at_base"]["kappa"].dump() << "], nu = "
      << inv["nu"].get<std::string>() << "  [base "
      << inv["at_base"]["nu"].dump() << "]\n";
  const Json& t = j["trivialisable"];
  out << "trivialisable: " << t["verdict"].get<std::string>() << " (route "
      << t["route"].get<std::string>() << "; kappa_zero "
      << t["kappa_zero"]["verdict"].get<std::string>() << ", L_f nu "
      << t["nu_along_drift"]["verdict"].get<std::string>()
      << ", L_[f,g] nu "
      << t["nu_along_bracket"]["verdict"].get<std::string>() << ")\n";
  out << "family: " << j["family"].get<std::string>() << "\n";
  for (const Json& w : j["witnesses"]) {
    out << "witness: " << w["check"].get<std::string>() << " at "
        << w["point"].dump() << " value " << w["value"].dump() << "\n";
  }
  return out.str();
}

}  // namespace kappanu
