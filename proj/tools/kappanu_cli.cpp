// kappanu: analyze single-input control-affine systems, generate catalog
// normal forms, apply transformations, check symmetries, and run the
// verification suites.
//
// Exit codes: 0 success/definite, 1 I/O, schema, or parameter errors,
// 2 assumption or transformation guard failures, 3 inconclusive sampling,
// 4 verification mismatch.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kappanu/report.hpp"
#include "kappanu/systemfile.hpp"
#include "kappanu/verification.hpp"

namespace k = kappanu;

namespace {

struct PlanFlags {
  std::optional<int> samples;
  std::optional<double> box;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;

  k::SamplePlan apply(k::SamplePlan plan) const {
    if (samples) plan.samples = *samples;
    if (box) plan.half_width = *box;
    if (tol) {
      plan.abs_tol = *tol;
      plan.rel_tol = *tol;
    }
    if (seed) plan.seed = *seed;
    return plan;
  }
};

void add_plan_flags(CLI::App* cmd, PlanFlags& flags) {
  cmd->add_option("--samples", flags.samples, "sample count per check");
  cmd->add_option("--box", flags.box, "sample box half-width");
  cmd->add_option("--tol", flags.tol, "absolute and relative tolerance");
  cmd->add_option("--seed", flags.seed, "sampler seed");
}

void emit(const k::Json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << k::dump_json(j);
  } else {
    k::save_json(j, out_path);
  }
}

k::Rational parse_rational_arg(const std::string& src, const char* what) {
  k::Expr e = k::parse_expression(src, {});
  if (!e.is_constant() || !e.value().exact()) {
    throw std::invalid_argument(std::string(what) +
                                ": expected an exact rational, got '" + src +
                                "'");
  }
  return e.value().rat();
}

std::vector<std::string> split_csv(const std::string& src) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : src) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_analyze(const std::string& path, bool json, const PlanFlags& flags) {
  k::SystemFile sf = k::load_system_file(path);
  k::SamplePlan plan = flags.apply(sf.plan);
  auto out = k::analyze_system(sf.system, plan);
  if (json) {
    std::cout << k::dump_json(out.report);
  } else {
    std::cout << k::render_text(out.report);
  }
  return out.exit_code;
}

int cmd_catalog(const std::string& family, const k::CatalogParams& params,
                const std::string& out_path, const PlanFlags& flags) {
  k::CatalogEntry entry = k::generate(family, params);
  k::SamplePlan plan = flags.apply(k::SamplePlan{});
  emit(k::catalog_entry_to_json(entry, plan), out_path);
  return 0;
}

int cmd_transform(const std::string& path, const std::string& alpha_src,
                  const std::string& beta_src,
                  const std::vector<std::string>& diffeo,
                  const std::string& out_path, const PlanFlags& flags) {
  k::SystemFile sf = k::load_system_file(path);
  k::SamplePlan plan = flags.apply(sf.plan);
  const k::Chart& chart = sf.system.chart();
  const auto& vars = chart.names();

  if (!diffeo.empty()) {
    auto parse_map = [&](const std::string& src, const char* what) {
      auto parts = split_csv(src);
      if (parts.size() != vars.size()) {
        throw std::invalid_argument(std::string(what) +
                                    ": component count must match vars");
      }
      std::vector<k::Expr> comps;
      for (const auto& p : parts) {
        comps.push_back(k::parse_expression(p, vars));
      }
      return comps;
    };
    k::Diffeomorphism d{parse_map(diffeo[0], "--diffeo forward"),
                        parse_map(diffeo[1], "--diffeo inverse")};
    auto pushed = k::pushforward(sf.system, d, plan);
    if (!pushed.ok()) {
      std::cerr << "error: forward and inverse do not invert each other "
                   "near the base point\n";
      return 2;
    }
    std::optional<k::ExpectedResults> expected;
    if (sf.expected) {
      // Scalar invariants transport by pull-back along the inverse;
      // symmetry generators push forward. Verdicts are chart-independent.
      k::Substitution inv = k::detail::bind_chart(chart, d.inverse);
      k::ExpectedResults e;
      e.eps = sf.expected->eps;
      if (sf.expected->kappa) e.kappa = substitute(*sf.expected->kappa, inv);
      if (sf.expected->nu) e.nu = substitute(*sf.expected->nu, inv);
      if (sf.expected->lambda1) {
        e.lambda1 = substitute(*sf.expected->lambda1, inv);
      }
      if (sf.expected->lambda3) {
        e.lambda3 = substitute(*sf.expected->lambda3, inv);
      }
      e.family = sf.expected->family;
      e.trivialisable = sf.expected->trivialisable;
      if (sf.expected->symmetry) {
        k::AlgebraPresentation pres = *sf.expected->symmetry;
        for (auto& gen : pres.generators) {
          gen = k::pushforward_field(gen, d);
        }
        e.symmetry = std::move(pres);
      }
      expected = std::move(e);
    }
    emit(k::system_file_to_json(*pushed.system, plan,
                                expected ? &*expected : nullptr),
         out_path);
    return 0;
  }

  k::FeedbackTransform t{k::parse_expression(alpha_src, vars),
                         k::parse_expression(beta_src, vars)};
  auto applied = k::apply_feedback(sf.system, t, plan);
  if (!applied.ok()) {
    std::cerr << "error: beta vanishes on the sample box\n";
    return 2;
  }
  std::optional<k::ExpectedResults> expected;
  if (sf.expected) {
    // (eps, kappa, nu), the family, and the trivialisability verdict are
    // feedback invariants; lambda1/lambda3 are not and get dropped.
    k::ExpectedResults e = *sf.expected;
    e.lambda1.reset();
    e.lambda3.reset();
    expected = std::move(e);
  }
  emit(k::system_file_to_json(*applied.system, plan,
                              expected ? &*expected : nullptr),
       out_path);
  return 0;
}

int cmd_symmetry(const std::string& path,
                 const std::vector<std::string>& fields, bool abelian,
                 bool json, const PlanFlags& flags) {
  if (fields.empty()) {
    throw std::invalid_argument("symmetry: at least one --field is required");
  }
  k::SystemFile sf = k::load_system_file(path);
  k::SamplePlan plan = flags.apply(sf.plan);
  const auto& vars = sf.system.chart().names();

  std::vector<k::SymmetryCandidate> candidates;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto parts = split_csv(fields[i]);
    if (parts.size() != vars.size()) {
      throw std::invalid_argument("--field: component count must match vars");
    }
    std::vector<k::Expr> comps;
    for (const auto& p : parts) {
      comps.push_back(k::parse_expression(p, vars));
    }
    candidates.push_back({k::VectorField(sf.system.chart(), comps),
                          "field " + std::to_string(i + 1)});
  }

  bool any_inconclusive = false;
  bool not_applicable = false;
  k::Json out;
  k::Json cand_json = k::Json::array();
  for (const auto& cand : candidates) {
    auto check = k::is_infinitesimal_symmetry(sf.system, cand, plan);
    if (!check.applicable) not_applicable = true;
    if (check.applicable && check.verdict == k::Verdict::kInconclusive) {
      any_inconclusive = true;
    }
    k::Json cj;
    cj["label"] = cand.label;
    cj["applicable"] = check.applicable;
    cj["verdict"] = k::verdict_name(check.verdict);
    cj["failures"] = check.failures;
    cand_json.push_back(cj);
    if (!json) {
      std::cout << cand.label << ": "
                << (check.applicable ? k::verdict_name(check.verdict)
                                     : "not applicable");
      if (!check.failures.empty()) {
        std::cout << " (fails";
        for (const auto& f : check.failures) std::cout << " " << f;
        std::cout << ")";
      }
      std::cout << "\n";
    }
  }
  out["candidates"] = cand_json;

  if (abelian) {
    auto cert = k::check_abelian_trivialisation(sf.system, candidates, plan);
    if (!cert.applicable) not_applicable = true;
    if (cert.applicable && cert.verdict == k::Verdict::kInconclusive) {
      any_inconclusive = true;
    }
    k::Json aj;
    aj["applicable"] = cert.applicable;
    aj["verdict"] = k::verdict_name(cert.verdict);
    aj["involutive"] = k::verdict_name(cert.involutive);
    aj["commuting"] = k::verdict_name(cert.commuting.verdict);
    aj["transversal"] = cert.transversal;
    if (cert.base_point_rank) aj["base_point_rank"] = *cert.base_point_rank;
    out["abelian"] = aj;
    if (!json) {
      std::cout << "abelian trivialisation: "
                << (cert.applicable ? k::verdict_name(cert.verdict)
                                    : "not applicable")
                << "\n";
    }
  }
  if (json) std::cout << k::dump_json(out);
  if (not_applicable) return 2;
  return any_inconclusive ? 3 : 0;
}

int cmd_verify(const std::string& path, const std::string& suite, bool json,
               const PlanFlags& flags) {
  std::vector<k::SuiteResult> results;
  if (!suite.empty()) {
    if (suite == "all") {
      for (const auto& name : k::suite_names()) {
        results.push_back(k::run_suite(name));
      }
    } else {
      results.push_back(k::run_suite(suite));
    }
  } else {
    k::SystemFile sf = k::load_system_file(path);
    if (!sf.expected) {
      throw std::invalid_argument(path + ": no expected block to verify");
    }
    k::SamplePlan plan = flags.apply(sf.plan);
    k::SuiteResult r{"file", {}};
    r.checks = k::verify_expected(sf.system, *sf.expected, plan, "expected");
    results.push_back(std::move(r));
  }

  bool all_pass = true;
  k::Json jr = k::Json::array();
  for (const auto& r : results) {
    if (!r.passed()) all_pass = false;
    k::Json checks = k::Json::array();
    for (const auto& c : r.checks) {
      if (!json) {
        std::cout << (c.passed ? "PASS" : "FAIL") << " " << r.suite << "/"
                  << c.name;
        if (!c.passed && !c.detail.empty()) std::cout << ": " << c.detail;
        std::cout << "\n";
      }
      checks.push_back(k::Json{{"name", c.name},
                               {"passed", c.passed},
                               {"detail", c.detail}});
    }
    if (!json) {
      std::cout << r.suite << ": " << r.checks.size() << " checks, "
                << r.failures() << " failures\n";
    }
    jr.push_back(k::Json{{"suite", r.suite},
                         {"passed", r.passed()},
                         {"checks", checks}});
  }
  if (json) std::cout << k::dump_json(k::Json{{"results", jr}});
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "symbolic-numeric analysis of control-affine systems: structure "
      "functions, feedback invariants (eps, kappa, nu), classification, "
      "normal-form catalog, and symmetry checks"};
  app.require_subcommand(1);

  std::string path, out_path, family, suite;
  bool json = false, abelian = false;
  PlanFlags flags;

  auto* analyze = app.add_subcommand("analyze", "run the invariant pipeline");
  analyze->add_option("file", path, "system file (JSON)")->required();
  analyze->add_flag("--json", json, "machine-readable report");
  add_plan_flags(analyze, flags);

  auto* catalog =
      app.add_subcommand("catalog", "generate a normal form with its "
                                    "expected invariants");
  k::CatalogParams params;
  std::string nu_expr_src, lambda_src, eta_src, p_src, q_src;
  catalog->add_option("family", family, "one of the catalog families")
      ->required();
  catalog->add_option("--eps", params.eps, "sign invariant, -1 or +1");
  catalog->add_option("--nu", params.nu, "constant nu (>= 0)");
  catalog->add_option("--kappa", params.kappa, "constant kappa");
  catalog->add_option("--nu1", params.nu1, "nu = nu1 x + nu0 slope");
  catalog->add_option("--nu0", params.nu0, "nu = nu1 x + nu0 offset");
  catalog->add_option("--shape", params.shape,
                      "cubic coefficient of the curvature profile");
  catalog->add_option("--nu-expr", nu_expr_src,
                      "nu(w) for the rectified-drift family");
  catalog->add_option("--lambda", lambda_src,
                      "comma-separated rational eigenvalues");
  catalog->add_option("--eta", eta_src, "comma-separated 0/1 switches");
  catalog->add_option("--k", params.k, "tangency order (>= 1)");
  catalog->add_option("--p", p_src, "first profile exponent (rational)");
  catalog->add_option("--q", q_src, "second profile exponent (rational)");
  catalog->add_option("-o,--out", out_path, "output path (default stdout)");
  add_plan_flags(catalog, flags);

  auto* transform = app.add_subcommand(
      "transform", "apply feedback (alpha, beta) or a chart diffeomorphism");
  std::string alpha_src, beta_src;
  std::vector<std::string> diffeo;
  transform->add_option("file", path, "system file (JSON)")->required();
  transform->add_option("--alpha", alpha_src, "feedback offset expression");
  transform->add_option("--beta", beta_src, "feedback scale expression");
  transform
      ->add_option("--diffeo", diffeo,
                   "forward and inverse component lists, comma-separated")
      ->expected(2);
  transform->add_option("-o,--out", out_path, "output path (default stdout)");
  add_plan_flags(transform, flags);

  auto* symmetry = app.add_subcommand(
      "symmetry", "check candidate infinitesimal symmetries");
  std::vector<std::string> fields;
  symmetry->add_option("file", path, "system file (JSON)")->required();
  symmetry->add_option("--field", fields,
                       "candidate field components, comma-separated "
                       "(repeatable)");
  symmetry->add_flag("--abelian", abelian,
                     "also run the abelian trivialisation certificate");
  symmetry->add_flag("--json", json, "machine-readable report");
  add_plan_flags(symmetry, flags);

  auto* verify = app.add_subcommand(
      "verify", "check a file's expected block or run a property suite");
  verify->add_option("file", path, "system file with an expected block");
  verify->add_option("--suite", suite,
                     "calculus | relations | lemma35 | invariance | "
                     "symmetry | catalog-roundtrip | determinism | all");
  verify->add_flag("--json", json, "machine-readable report");
  add_plan_flags(verify, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(path, json, flags);
    if (catalog->parsed()) {
      if (!nu_expr_src.empty()) {
        params.nu_of_w = k::parse_expression(nu_expr_src, {"x", "y", "w"});
      }
      if (!lambda_src.empty()) {
        for (const auto& item : split_csv(lambda_src)) {
          params.lambda.push_back(parse_rational_arg(item, "--lambda"));
        }
      }
      if (!eta_src.empty()) {
        for (const auto& item : split_csv(eta_src)) {
          params.eta.push_back(std::stoi(item));
        }
      }
      if (!p_src.empty()) params.p = parse_rational_arg(p_src, "--p");
      if (!q_src.empty()) params.q = parse_rational_arg(q_src, "--q");
      return cmd_catalog(family, params, out_path, flags);
    }
    if (transform->parsed()) {
      if (diffeo.empty() && (alpha_src.empty() || beta_src.empty())) {
        throw std::invalid_argument(
            "transform: need --alpha and --beta, or --diffeo");
      }
      return cmd_transform(path, alpha_src, beta_src, diffeo, out_path,
                           flags);
    }
    if (symmetry->parsed()) {
      return cmd_symmetry(path, fields, abelian, json, flags);
    }
    if (verify->parsed()) {
      if (path.empty() && suite.empty()) {
        throw std::invalid_argument("verify: need a file or --suite");
      }
      return cmd_verify(path, suite, json, flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
