#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gravcs/rational.hpp"

namespace gravcs {

// A family of boundary operators: the rule for evaluating a quarter of its
// eta invariant on ledger entries, and how many copies (multiplicity nu)
// travel together.  All arithmetic in this module is exact rational; no
// floating point enters anywhere.
struct OperatorFamily {
  std::string name;
  int dimension = 3;  // boundary dimension n; entries live in dimension n+1
  int multiplicity = 1;  // nu > 0
  // sigma-linear rule: 1/4 eta = sigma_coeff * sigma (mod 1), when present
  std::optional<Rational> sigma_coeff;

  friend bool operator==(const OperatorFamily&, const OperatorFamily&) =
      default;
};

// One closed (n+1)-manifold with the invariants the cancellation conditions
// consume.  Unorientable entries carry no signature; they name their
// orientation double cover and pin 1/4 eta per family directly.  Direct
// values take precedence over the family rule wherever both are available
// (the rule's hypotheses can fail, e.g. on fibered geometries).
struct LedgerEntry {
  std::string name;
  int dimension = 4;
  bool orientable = true;
  bool mapping_torus = false;  // member of the fibered sub-table
  std::optional<Rational> sigma;  // signature
  std::optional<Rational> p1;     // first Pontryagin number
  std::string double_cover;       // entry name; unorientable entries only
  std::map<std::string, Rational> direct_eta;  // family name -> 1/4 eta
  std::string source;  // provenance of externally sourced values

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct Ledger {
  std::vector<OperatorFamily> families;
  std::vector<LedgerEntry> entries;

  const OperatorFamily& family(const std::string& name) const;
  const LedgerEntry& entry(const std::string& name) const;
  // unique names; multiplicities positive; orientable 4-d entries with both
  // invariants satisfy p1 = 3 sigma exactly; unorientable entries name an
  // orientable double cover present in the table
  void validate() const;
};

// the table shipped with the library (identical to data/ledger.json)
Ledger builtin_ledger();
// load from json (rationals written as "p/q" strings); validates
Ledger load_ledger(const std::string& path);

// The five cancellation-condition variants.  Writing q = 1/4 eta, nu the
// family multiplicity, c the counterterm coefficient against the integral
// of p1, each entry N must satisfy, mod 1:
//   AnnomFinal    nu*q(N) == c*p1(N)        mapping tori, oriented
//   AnnomFinalU   nu*q(N) == c*p1(N)        any oriented N
//   AnnomFinalW   nu*q(N) == 0              any oriented N, no counterterm
//   Anomaly2      nu*q(N) == c*p1(Nc)/2     mapping tori with double cover Nc
//   AnnomFinalU2  nu*q(N) == c*p1(Nc)/2     any N with double cover Nc
// For orientable N the orientation double cover is two disjoint copies, so
// p1(Nc)/2 = p1(N) and the double-cover conditions extend the oriented ones.
enum class ConditionId {
  AnnomFinal,
  AnnomFinalU,
  AnnomFinalW,
  Anomaly2,
  AnnomFinalU2,
};

const char* to_string(ConditionId id);
// throws std::invalid_argument listing the known ids
ConditionId parse_condition(const std::string& name);
bool uses_counterterm(ConditionId id);  // false only for AnnomFinalW

// 1/4 eta of the family on one entry, reduced mod 1.  Direct table first,
// then the sigma rule; an entry covered by neither is an error naming it.
Rational eta_quarter(const OperatorFamily& fam, const LedgerEntry& e);

struct CongruenceVerdict {
  std::string entry;
  Rational lhs;      // nu * 1/4 eta, mod 1
  Rational rhs;      // counterterm * weight, mod 1
  Rational residue;  // lhs - rhs, mod 1; zero iff pass
  bool pass = false;
};

struct ConditionReport {
  ConditionId id = ConditionId::AnnomFinal;
  std::string family;
  Rational counterterm;
  std::vector<CongruenceVerdict> verdicts;
  bool pass = true;
};

// Evaluate one condition entry-by-entry with the supplied counterterm.
// Unorientable entries fed to an oriented-only condition are an error, as is
// a nonzero counterterm for AnnomFinalW.
ConditionReport check_condition(const Ledger& ledger,
                                const OperatorFamily& fam, ConditionId id,
                                const Rational& counterterm,
                                const std::vector<std::string>& entry_names);

// Exact solve of the simultaneous congruences c*w_e == nu*q_e (mod 1) for
// the single unknown c (the counterterm space is one-dimensional in this
// dimension; the scheme extends to one solve per generator in higher ones).
// Returns the representative of minimal absolute value, ties broken toward
// the positive one; nullopt if the congruences are unsatisfiable.  An empty
// entry list yields 0.
std::optional<Rational> solve_counterterm(
    const Ledger& ledger, const OperatorFamily& fam, ConditionId id,
    const std::vector<std::string>& entry_names);

struct MultiplicityResult {
  std::optional<int> nu;   // smallest passing multiplicity, if any in range
  Rational counterterm;    // a witness counterterm for that nu
  int bound = 64;          // top of the scanned range, for reporting
};

// Smallest nu in [lo, hi] for which the condition is satisfiable (a solving
// counterterm exists; for AnnomFinalW, the zero counterterm passes).
MultiplicityResult min_multiplicity(const Ledger& ledger,
                                    const OperatorFamily& fam, ConditionId id,
                                    const std::vector<std::string>& entry_names,
                                    int lo = 1, int hi = 64);

enum class EntryScope { all, oriented, mapping_torus };
std::vector<std::string> select_entries(const Ledger& ledger,
                                        EntryScope scope);

}  // namespace gravcs
