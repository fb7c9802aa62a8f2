#pragma once

// JSON interchange for systems, sample plans, and expected-results blocks.
// Keys are emitted in a fixed order so identical inputs serialize to
// byte-identical files.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "kappanu/catalog.hpp"
#include "kappanu/parse.hpp"

namespace kappanu {

using Json = nlohmann::ordered_json;

struct SystemFile {
  ControlSystem system;
  SamplePlan plan;
  std::optional<ExpectedResults> expected;
};

namespace detail {

inline const Json& require_field(const Json& j, const char* key,
                                 const char* where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string(where) + ": missing '" + key +
                                "'");
  }
  return *it;
}

inline std::vector<std::string> string_list(const Json& j, const char* where) {
  if (!j.is_array()) {
    throw std::invalid_argument(std::string(where) + ": expected an array");
  }
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw std::invalid_argument(std::string(where) +
                                  ": expected strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline Expr parse_component(const std::string& src,
                            const std::vector<std::string>& vars,
                            const char* where) {
  try {
    return parse_expression(src, vars);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string(where) + ": '" + src +
                                "': " + e.what());
  }
}

// Numeric literals in action tables are expression strings that must fold
// to an exact constant ("-3/2", "2").
inline Number parse_exact_number(const std::string& src, const char* where) {
  Expr e = parse_component(src, {}, where);
  if (!e.is_constant()) {
    throw std::invalid_argument(std::string(where) + ": '" + src +
                                "' is not a constant");
  }
  return e.value();
}

inline Family family_from_name(const std::string& name) {
  for (Family f :
       {Family::kNone, Family::kFlat, Family::kCentroFlat,
        Family::kFlatConstant, Family::kCentroFlatConstant,
        Family::kCompletelyFlat}) {
    if (name == family_name(f)) return f;
  }
  throw std::invalid_argument("expected.family: unknown name '" + name + "'");
}

}  // namespace detail

inline Json plan_to_json(const SamplePlan& plan) {
  Json j;
  j["samples"] = plan.samples;
  j["half_width"] = plan.half_width;
  j["abs_tol"] = plan.abs_tol;
  j["rel_tol"] = plan.rel_tol;
  j["max_resamples"] = plan.max_resamples;
  j["seed"] = plan.seed;
  return j;
}

// Partial plans are allowed; absent keys keep the base value.
inline SamplePlan plan_from_json(const Json& j, SamplePlan base = {}) {
  if (!j.is_object()) {
    throw std::invalid_argument("plan: expected an object");
  }
  if (j.contains("samples")) base.samples = j["samples"].get<int>();
  if (j.contains("half_width")) base.half_width = j["half_width"].get<double>();
  if (j.contains("abs_tol")) base.abs_tol = j["abs_tol"].get<double>();
  if (j.contains("rel_tol")) base.rel_tol = j["rel_tol"].get<double>();
  if (j.contains("max_resamples")) {
    base.max_resamples = j["max_resamples"].get<int>();
  }
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  return base;
}

inline Json expected_to_json(const ExpectedResults& e) {
  Json j;
  if (e.eps) j["eps"] = *e.eps;
  if (e.kappa) j["kappa"] = to_string(*e.kappa);
  if (e.nu) j["nu"] = to_string(*e.nu);
  if (e.lambda1) j["lambda1"] = to_string(*e.lambda1);
  if (e.lambda3) j["lambda3"] = to_string(*e.lambda3);
  if (e.family) j["family"] = family_name(*e.family);
  if (e.trivialisable) j["trivialisable"] = *e.trivialisable;
  if (e.symmetry) {
    Json s;
    Json gens = Json::array();
    for (const VectorField& v : e.symmetry->generators) {
      Json comps = Json::array();
      for (const Expr& c : v.components()) comps.push_back(to_string(c));
      gens.push_back(comps);
    }
    s["generators"] = gens;
    Json action = Json::array();
    for (const auto& row : e.symmetry->action) {
      Json r = Json::array();
      for (const Number& n : row) r.push_back(n.str());
      action.push_back(r);
    }
    s["action"] = action;
    if (e.symmetry->power) s["power"] = *e.symmetry->power;
    j["symmetry"] = s;
  }
  return j;
}

inline ExpectedResults expected_from_json(const Json& j, const Chart& chart) {
  if (!j.is_object()) {
    throw std::invalid_argument("expected: expected an object");
  }
  const auto& vars = chart.names();
  ExpectedResults out;
  if (j.contains("eps")) out.eps = j["eps"].get<int>();
  auto expr_field = [&](const char* key) -> std::optional<Expr> {
    if (!j.contains(key)) return std::nullopt;
    return detail::parse_component(j[key].get<std::string>(), vars,
                                   "expected");
  };
  out.kappa = expr_field("kappa");
  out.nu = expr_field("nu");
  out.lambda1 = expr_field("lambda1");
  out.lambda3 = expr_field("lambda3");
  if (j.contains("family")) {
    out.family = detail::family_from_name(j["family"].get<std::string>());
  }
  if (j.contains("trivialisable")) {
    out.trivialisable = j["trivialisable"].get<bool>();
  }
  if (j.contains("symmetry")) {
    const Json& s = j["symmetry"];
    AlgebraPresentation pres;
    for (const Json& gen :
         detail::require_field(s, "generators", "expected.symmetry")) {
      auto comps = detail::string_list(gen, "expected.symmetry.generators");
      if (comps.size() != chart.dim()) {
        throw std::invalid_argument(
            "expected.symmetry.generators: component count must match vars");
      }
      std::vector<Expr> parsed;
      for (const auto& c : comps) {
        parsed.push_back(
            detail::parse_component(c, vars, "expected.symmetry"));
      }
      pres.generators.emplace_back(chart, parsed);
    }
    for (const Json& row :
         detail::require_field(s, "action", "expected.symmetry")) {
      std::vector<Number> r;
      for (const auto& cell : detail::string_list(
               row, "expected.symmetry.action")) {
        r.push_back(detail::parse_exact_number(cell, "expected.symmetry"));
      }
      pres.action.push_back(std::move(r));
    }
    if (s.contains("power")) pres.power = s["power"].get<int>();
    out.symmetry = std::move(pres);
  }
  return out;
}

inline Json system_file_to_json(const ControlSystem& sys,
                                const SamplePlan& plan,
                                const ExpectedResults* expected) {
  Json j;
  Json vars = Json::array();
  for (const std::string& name : sys.chart().names()) vars.push_back(name);
  j["vars"] = vars;
  Json f = Json::array();
  for (const Expr& c : sys.f().components()) f.push_back(to_string(c));
  j["f"] = f;
  Json g = Json::array();
  for (const VectorField& gi : sys.controls()) {
    Json comps = Json::array();
    for (const Expr& c : gi.components()) comps.push_back(to_string(c));
    g.push_back(comps);
  }
  j["g"] = g;
  j["base"] = sys.base_point();
  j["plan"] = plan_to_json(plan);
  if (expected) j["expected"] = expected_to_json(*expected);
  return j;
}

inline SystemFile system_file_from_json(const Json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("system file: expected a JSON object");
  }
  auto vars = detail::string_list(detail::require_field(j, "vars", "system file"),
                                  "vars");
  if (vars.empty()) {
    throw std::invalid_argument("system file: 'vars' must be nonempty");
  }
  Chart chart(vars);
  auto parse_field = [&](const Json& comps, const char* where) {
    auto strs = detail::string_list(comps, where);
    if (strs.size() != vars.size()) {
      throw std::invalid_argument(std::string(where) +
                                  ": component count must match vars");
    }
    std::vector<Expr> out;
    for (const auto& s : strs) {
      out.push_back(detail::parse_component(s, vars, where));
    }
    return VectorField(chart, out);
  };
  VectorField f = parse_field(detail::require_field(j, "f", "system file"),
                              "f");
  const Json& gj = detail::require_field(j, "g", "system file");
  if (!gj.is_array() || gj.empty()) {
    throw std::invalid_argument("system file: 'g' must be a nonempty array");
  }
  std::vector<VectorField> gs;
  for (const Json& gi : gj) gs.push_back(parse_field(gi, "g"));
  const Json& basej = detail::require_field(j, "base", "system file");
  if (!basej.is_array() || basej.size() != vars.size()) {
    throw std::invalid_argument("system file: 'base' size must match vars");
  }
  std::vector<double> base;
  for (const Json& b : basej) base.push_back(b.get<double>());

  SamplePlan plan;
  if (j.contains("plan")) plan = plan_from_json(j["plan"], plan);
  std::optional<ExpectedResults> expected;
  if (j.contains("expected")) {
    expected = expected_from_json(j["expected"], chart);
  }
  return SystemFile{ControlSystem(chart, f, gs, base), plan,
                    std::move(expected)};
}

inline Json catalog_entry_to_json(const CatalogEntry& entry,
                                  const SamplePlan& plan = {}) {
  return system_file_to_json(entry.system, plan, &entry.expected);
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
  return j;
}

inline SystemFile load_system_file(const std::string& path) {
  return system_file_from_json(load_json(path));
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  out << dump_json(j);
}

}  // namespace kappanu
