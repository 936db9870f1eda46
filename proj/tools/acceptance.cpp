// Acceptance gate: runs the verify-all suite twice with the shipped
// defaults, derives the eleven release criteria from the results, and prints
// one pass/fail line per criterion.  Exit 0 only when every criterion holds
// and the full suite is green.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gravcs/suite.hpp"

using gravcs::CheckResult;

namespace {

const CheckResult* find(const std::vector<CheckResult>& rs,
                        const std::string& id) {
  for (const CheckResult& r : rs)
    if (r.id == id) return &r;
  return nullptr;
}

struct Gate {
  int num;
  const char* name;
  std::vector<std::string> ids;
  double time_limit = 0.0;  // seconds; 0 = no budget for this criterion
};

}  // namespace

int main() {
  gravcs::RunOptions opt;  // shipped defaults: seed 0, scale 1, built-in table
  std::vector<CheckResult> run1 = gravcs::run_checks("verify-all", opt);
  std::vector<CheckResult> run2 = gravcs::run_checks("verify-all", opt);
  std::string rep1 = gravcs::make_report(run1, "verify-all", opt).dump(2);
  std::string rep2 = gravcs::make_report(run2, "verify-all", opt).dump(2);

  const std::vector<Gate> gates = {
      {1,
       "background-shift identity with refinement",
       {"cs-action/background-shift", "cs-action/refinement-order"},
       30.0},
      {2,
       "variation independent of the metric",
       {"delta/metric-independence"},
       120.0},
      {3, "variation additive under composition", {"delta/cocycle"}},
      {4, "variation vanishes on isotopy flows", {"delta/isotopy-flows"}},
      {5,
       "3-d variation equals the 4-d mapping-torus number (2 metrics x 2 "
       "shears x 2 cutoffs)",
       {"mapping-torus/agreement-bump-xy-eps10",
        "mapping-torus/agreement-bump-xy-eps20",
        "mapping-torus/agreement-bump-yz-eps10",
        "mapping-torus/agreement-bump-yz-eps20",
        "mapping-torus/agreement-flat-xy-eps10",
        "mapping-torus/agreement-flat-xy-eps20",
        "mapping-torus/agreement-flat-yz-eps10",
        "mapping-torus/agreement-flat-yz-eps20"}},
      {6,
       "orientation-reversing class is half of its square",
       {"delta/half-relation"}},
      {7,
       "action 1-form annihilates Lie-derivative directions",
       {"cotton/basicness-1", "cotton/basicness-2", "cotton/basicness-3"}},
      {8,
       "Cotton two-route agreement and conformally flat vanishing",
       {"cotton/two-route", "cotton/conformally-flat-pairings",
        "cotton/conformally-flat-pointwise"}},
      {9,
       "homotopic paths agree and reproduce the variation",
       {"holonomy/homotopic-paths"}},
      {10,
       "ledger reproduction: K3 weak failure, c = 1/96, min nu 16 and 8",
       {"ledger/weak-k3", "ledger/universal-counterterm",
        "ledger/min-multiplicity-universal",
        "ledger/min-multiplicity-fibered"},
       1.0},
  };

  bool all_ok = true;
  for (const Gate& g : gates) {
    bool ok = true;
    bool exact = true;
    double worst_resid = 0.0, min_tol = 0.0, secs = 0.0;
    for (const std::string& id : g.ids) {
      const CheckResult* r = find(run1, id);
      if (!r) {
        ok = false;
        continue;
      }
      secs += r->seconds;
      ok = ok && r->pass;
      if (!r->exact) {
        exact = false;
        worst_resid = std::max(worst_resid, r->residual);
        min_tol = min_tol == 0.0 ? r->tolerance : std::min(min_tol, r->tolerance);
      }
    }
    char detail[160];
    if (exact)
      std::snprintf(detail, sizeof detail, "exact rational equality");
    else
      std::snprintf(detail, sizeof detail, "worst residual %.3e vs %.3e",
                    worst_resid, min_tol);
    char timing[80];
    if (g.time_limit > 0.0) {
      if (secs >= g.time_limit) ok = false;
      std::snprintf(timing, sizeof timing, "; %.1f s < %.0f s", secs,
                    g.time_limit);
    } else {
      std::snprintf(timing, sizeof timing, "; %.1f s", secs);
    }
    std::printf("criterion %02d %s %s (%s%s)\n", g.num, ok ? "PASS" : "FAIL",
                g.name, detail, timing);
    all_ok = all_ok && ok;
  }

  bool identical = rep1 == rep2;
  bool enough = run1.size() >= 20 && run1.size() == run2.size();
  bool c11 = identical && enough;
  std::printf("criterion 11 %s byte-identical reports across two runs "
              "(%zu checks, %zu bytes)\n",
              c11 ? "PASS" : "FAIL", run1.size(), rep1.size());
  all_ok = all_ok && c11;

  int green = 0;
  for (const CheckResult& r : run1) green += r.pass ? 1 : 0;
  std::printf("verify-all: %d/%zu checks green\n", green, run1.size());
  if (green != static_cast<int>(run1.size())) all_ok = false;

  std::printf("acceptance: %s\n", all_ok ? "PASS" : "FAIL");
  return all_ok ? 0 : 1;
}
