// Acceptance harness: one pass/fail line per criterion, exit 0 only when
// all seven hold. Tolerances are pinned here and inside the suites:
//   1. catalog round-trip              1e-7, exact family/verdicts
//   2. transformation-law oracle       1e-8, 10 systems x 10 (alpha, beta)
//   3. frame and canonical relations   1e-9
//   4. invariance of kappa and |nu|    1e-8, plus the nu sign flip
//   5. symmetry verdicts, rank condition, presentations, integrality
//   6. bracket calculus 1e-10 on 100 triples, finite differences 1e-6
//   7. byte-identical analyze reports across two CLI runs

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "kappanu/verification.hpp"

namespace {

int failures = 0;

void report(int index, const std::string& label, bool ok,
            const std::string& detail) {
  std::printf("criterion %d: %s ... %s%s\n", index, label.c_str(),
              ok ? "PASS" : "FAIL",
              ok || detail.empty() ? "" : (" (" + detail + ")").c_str());
  if (!ok) ++failures;
}

void run_suite_criterion(int index, const std::string& label,
                         const std::string& suite) {
  kappanu::SuiteResult r = kappanu::run_suite(suite);
  std::string detail;
  for (const auto& c : r.checks) {
    if (!c.passed) {
      detail = c.name + (c.detail.empty() ? "" : ": " + c.detail);
      break;
    }
  }
  std::ostringstream full;
  full << label << " [" << r.checks.size() << " checks]";
  report(index, full.str(), r.passed(), detail);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void run_cli_determinism(int index) {
  const std::string cli = KAPPANU_CLI_PATH;
  const std::string dir = "/tmp";
  const std::string file = dir + "/kappanu_accept_sys.json";
  const std::string out1 = dir + "/kappanu_accept_run1.json";
  const std::string out2 = dir + "/kappanu_accept_run2.json";
  std::string gen = cli + " catalog completely-flat --eps -1 -o " + file;
  bool ok = std::system(gen.c_str()) == 0;
  if (ok) {
    std::string run1 = cli + " analyze " + file + " --json > " + out1;
    std::string run2 = cli + " analyze " + file + " --json > " + out2;
    ok = std::system(run1.c_str()) == 0 && std::system(run2.c_str()) == 0;
  }
  std::string a, b;
  if (ok) {
    a = slurp(out1);
    b = slurp(out2);
    ok = !a.empty() && a == b;
  }
  report(index, "determinism: two analyze runs, byte-identical JSON", ok,
         ok ? "" : "reports differ or CLI failed");
}

}  // namespace

int main() {
  run_suite_criterion(1, "catalog round-trip, tolerance 1e-7",
                      "catalog-roundtrip");
  run_suite_criterion(
      2, "transformation-law oracle, 10 x 10, tolerance 1e-8", "lemma35");
  run_suite_criterion(3, "frame and canonical relations, tolerance 1e-9",
                      "relations");
  run_suite_criterion(
      4, "kappa and |nu| invariance 1e-8, nu sign equivariance",
      "invariance");
  run_suite_criterion(
      5, "symmetry verdicts, rank condition, presentations, integrality",
      "symmetry");
  run_suite_criterion(
      6, "bracket calculus 1e-10, finite differences 1e-6 relative",
      "calculus");
  run_cli_determinism(7);
  return failures == 0 ? 0 : 1;
}
