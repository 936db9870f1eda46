#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace gravcs {

inline constexpr const char* kVersion = "0.1.0";

// Options shared by every check run.  The seed is an offset added to each
// check's frozen draw seeds, so seed 0 reproduces the calibrated
// configurations and any other value replays the same properties on fresh
// draws.  Tolerances are multiplied by tolerance_scale.  jobs > 0 pins the
// OpenMP thread count; timings controls whether wall times appear in the
// report (they are always measured, but break byte-for-byte reproducibility
// when serialized).
struct RunOptions {
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  int jobs = 0;
  bool timings = false;
  std::string ledger_file;  // empty: the built-in table
  std::string ledger_family = "majorana";
};

// Catalog entry describing one check; `detail` is the text behind
// `gravcs explain <id>`: the identity being exercised, the frozen
// construction, and why the tolerance is what it is.
struct CheckInfo {
  std::string id;  // "<category>/<name>"
  std::string category;
  std::string summary;
  std::string detail;
};

struct CheckResult {
  std::string id;
  std::string category;
  std::string inputs;  // frozen parameters, human readable
  std::string digest;  // FNV-1a 64-bit hash of `inputs`, hex
  std::vector<std::pair<std::string, std::string>> values;
  double residual = 0.0;
  double tolerance = 0.0;  // after tolerance_scale; 0 for exact checks
  bool exact = false;      // exact-arithmetic check, pass/fail has no slack
  bool pass = false;
  std::string error;  // nonempty when the check threw; pass stays false
  double seconds = 0.0;
};

// catalog sorted by id; stable across runs
const std::vector<CheckInfo>& check_catalog();
// the category names, in catalog order
std::vector<std::string> check_categories();

// Run the checks selected by `selector`: "verify-all" (or "all") for the
// whole catalog, a category name for that category, or a full check id for
// a single check.  Unknown selectors throw std::invalid_argument listing
// the categories.  Results come back sorted by id; a check that throws is
// reported as a failure with its message in `error`, never as a crash.
std::vector<CheckResult> run_checks(const std::string& selector,
                                    const RunOptions& opt);

// Run the declarative experiments from a config's "experiments" array: each
// element names a kind (one of the run categories), a grid / metric /
// diffeomorphism / polynomial / path / ledger specification as needed, and
// an optional tolerance or exact expectation.  Results carry ids
// "<kind>/custom-<name>".  Every element is validated (malformed
// specifications or unresolvable names throw std::invalid_argument before
// any experiment runs), but only those whose kind or id matches `selector`
// are executed; "verify-all"/"all" executes everything.  Numerical failures
// are reported per check like run_checks.
std::vector<CheckResult> run_experiments(const nlohmann::json& experiments,
                                         const RunOptions& opt,
                                         const std::string& selector = "verify-all");

// JSON report over the results: environment block, per-check records in id
// order, aggregate verdict.  Byte-identical for identical options and
// results; wall times are included only when opt.timings is set.
nlohmann::ordered_json make_report(const std::vector<CheckResult>& results,
                                   const std::string& selector,
                                   const RunOptions& opt);

// explain text for one check id; throws std::invalid_argument with the
// known ids when the id is unknown
std::string explain_check(const std::string& id);

}  // namespace gravcs
