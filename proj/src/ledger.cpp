#include "gravcs/ledger.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace gravcs {
namespace {

using i128 = __int128;

std::int64_t checked64(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("ledger arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// x*a + y*b = gcd(a, b) for a, b >= 0
i128 egcd(i128 a, i128 b, i128& x, i128& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  i128 x1, y1;
  i128 g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// affine lattice { base + mod * k : k integer } with mod > 0
struct Coset {
  Rational base;
  Rational mod;
};

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  return checked64(i128(a) / gcd128(a, b) * b);
}

// intersection of two cosets, empty when the congruences conflict
std::optional<Coset> intersect(const Coset& A, const Coset& B) {
  std::int64_t D = lcm64(lcm64(A.base.den(), A.mod.den()),
                         lcm64(B.base.den(), B.mod.den()));
  i128 C1 = i128(A.base.num()) * (D / A.base.den());
  i128 N1 = i128(A.mod.num()) * (D / A.mod.den());
  i128 C2 = i128(B.base.num()) * (D / B.base.den());
  i128 N2 = i128(B.mod.num()) * (D / B.mod.den());
  i128 g = gcd128(N1, N2);
  if ((C2 - C1) % g != 0) return std::nullopt;
  i128 n1g = N1 / g, n2g = N2 / g;
  i128 x, y;
  egcd(n1g % n2g, n2g, x, y);  // x inverts N1/g modulo N2/g
  i128 t = ((C2 - C1) / g % n2g) * (x % n2g) % n2g;
  i128 L = N1 * n2g;  // lcm(N1, N2)
  i128 X = (C1 + N1 * t) % L;
  if (X < 0) X += L;
  return Coset{Rational(checked64(X), D), Rational(checked64(L), D)};
}

// representative of x mod M with minimal absolute value, ties positive
Rational centered(const Rational& x, const Rational& M) {
  Rational q = x / M;
  std::int64_t k = q.num() / q.den();
  if (q.num() % q.den() != 0 && q.num() < 0) --k;  // floor for negatives
  Rational r = x - M * Rational(k);                 // now r in [0, M)
  if (M < Rational(2) * r) r = r - M;
  return r;
}

// coefficient w multiplying the counterterm in nu*q == c*w (mod 1)
Rational condition_weight(const Ledger& ledger, ConditionId id,
                          const LedgerEntry& e) {
  switch (id) {
    case ConditionId::AnnomFinal:
    case ConditionId::AnnomFinalU:
    case ConditionId::AnnomFinalW:
      if (!e.orientable)
        throw std::invalid_argument(
            "unorientable entry '" + e.name +
            "' passed to oriented-only condition " + to_string(id));
      if (id == ConditionId::AnnomFinalW) return Rational(0);
      if (!e.p1)
        throw std::invalid_argument("entry '" + e.name + "' has no p1 value");
      return *e.p1;
    case ConditionId::Anomaly2:
    case ConditionId::AnnomFinalU2: {
      if (e.orientable) {
        // orientation double cover = two disjoint copies: p1(cover)/2 = p1
        if (!e.p1)
          throw std::invalid_argument("entry '" + e.name +
                                      "' has no p1 value");
        return *e.p1;
      }
      const LedgerEntry& cover = ledger.entry(e.double_cover);
      if (!cover.p1)
        throw std::invalid_argument("double cover '" + cover.name +
                                    "' has no p1 value");
      return Rational(1, 2) * *cover.p1;
    }
  }
  throw std::logic_error("unhandled condition id");
}

}  // namespace

const OperatorFamily& Ledger::family(const std::string& name) const {
  for (const auto& f : families)
    if (f.name == name) return f;
  throw std::invalid_argument("unknown operator family '" + name + "'");
}

const LedgerEntry& Ledger::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::invalid_argument("unknown ledger entry '" + name + "'");
}

void Ledger::validate() const {
  std::set<std::string> seen;
  for (const auto& f : families) {
    if (!seen.insert(f.name).second)
      throw std::invalid_argument("duplicate family '" + f.name + "'");
    if (f.multiplicity < 1)
      throw std::invalid_argument("family '" + f.name +
                                  "' has non-positive multiplicity");
  }
  seen.clear();
  for (const auto& e : entries) {
    if (!seen.insert(e.name).second)
      throw std::invalid_argument("duplicate entry '" + e.name + "'");
    for (const auto& [fam, value] : e.direct_eta) {
      family(fam);  // must resolve
      (void)value;
    }
    if (e.orientable) {
      if (e.dimension == 4 && e.sigma && e.p1 &&
          !(*e.p1 == Rational(3) * *e.sigma))
        throw std::invalid_argument("entry '" + e.name +
                                    "' violates p1 = 3*sigma");
    } else {
      if (e.sigma || e.p1)
        throw std::invalid_argument(
            "unorientable entry '" + e.name +
            "' cannot carry signature or p1 directly");
      if (e.double_cover.empty())
        throw std::invalid_argument("unorientable entry '" + e.name +
                                    "' names no double cover");
      const LedgerEntry& cover = entry(e.double_cover);
      if (!cover.orientable)
        throw std::invalid_argument("double cover '" + cover.name +
                                    "' of '" + e.name + "' is unorientable");
      if (cover.dimension != e.dimension)
        throw std::invalid_argument("double cover '" + cover.name +
                                    "' of '" + e.name +
                                    "' has mismatched dimension");
    }
  }
}

Ledger builtin_ledger() {
  Ledger L;
  L.families.push_back(OperatorFamily{
      .name = "majorana",
      .dimension = 3,
      .multiplicity = 1,
      .sigma_coeff = Rational(1, 32),
  });
  L.entries.push_back(LedgerEntry{
      .name = "K3",
      .sigma = Rational(-16),
      .p1 = Rational(-48),
      .source = "K3 surface; signature -16, p1 = 3*sigma by the signature "
                "theorem",
  });
  L.entries.push_back(LedgerEntry{
      .name = "CP2",
      .sigma = Rational(1),
      .p1 = Rational(3),
      .source = "complex projective plane; standard characteristic numbers",
  });
  L.entries.push_back(LedgerEntry{
      .name = "S4",
      .sigma = Rational(0),
      .p1 = Rational(0),
      .source = "round 4-sphere; all invariants vanish",
  });
  L.entries.push_back(LedgerEntry{
      .name = "T4",
      .mapping_torus = true,
      .sigma = Rational(0),
      .p1 = Rational(0),
      .source = "flat 4-torus, the identity mapping torus of T^3; "
                "all invariants vanish",
  });
  L.entries.push_back(LedgerEntry{
      .name = "RP4",
      .orientable = false,
      .double_cover = "S4",
      .direct_eta = {{"majorana", Rational(1, 16)}},
      .source = "real projective 4-space; Dirac 1/4 eta = 1/16 from the "
                "literature, orientation double cover S^4",
  });
  L.entries.push_back(LedgerEntry{
      .name = "T3-shear-torus",
      .mapping_torus = true,
      .sigma = Rational(0),
      .p1 = Rational(0),
      .direct_eta = {{"majorana", Rational(1, 8)}},
      .source = "mapping torus of a T^3 shear; signature 0, 1/4 eta = 1/8 "
                "from the literature (the sigma rule does not see the "
                "fibered spin structure)",
  });
  L.validate();
  return L;
}

Ledger load_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ledger file '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);
  Ledger L;
  for (const auto& jf : j.at("families")) {
    OperatorFamily f;
    f.name = jf.at("name").get<std::string>();
    f.dimension = jf.at("dimension").get<int>();
    f.multiplicity = jf.at("multiplicity").get<int>();
    if (jf.contains("sigma_coeff"))
      f.sigma_coeff = Rational::parse(jf.at("sigma_coeff").get<std::string>());
    L.families.push_back(std::move(f));
  }
  for (const auto& je : j.at("entries")) {
    LedgerEntry e;
    e.name = je.at("name").get<std::string>();
    e.dimension = je.at("dimension").get<int>();
    e.orientable = je.value("orientable", true);
    e.mapping_torus = je.value("mapping_torus", false);
    if (je.contains("sigma"))
      e.sigma = Rational::parse(je.at("sigma").get<std::string>());
    if (je.contains("p1"))
      e.p1 = Rational::parse(je.at("p1").get<std::string>());
    e.double_cover = je.value("double_cover", std::string{});
    if (je.contains("eta"))
      for (const auto& [fam, val] : je.at("eta").items())
        e.direct_eta[fam] = Rational::parse(val.get<std::string>());
    e.source = je.value("source", std::string{});
    L.entries.push_back(std::move(e));
  }
  L.validate();
  return L;
}

const char* to_string(ConditionId id) {
  switch (id) {
    case ConditionId::AnnomFinal:
      return "AnnomFinal";
    case ConditionId::AnnomFinalU:
      return "AnnomFinalU";
    case ConditionId::AnnomFinalW:
      return "AnnomFinalW";
    case ConditionId::Anomaly2:
      return "Anomaly2";
    case ConditionId::AnnomFinalU2:
      return "AnnomFinalU2";
  }
  throw std::logic_error("unhandled condition id");
}

ConditionId parse_condition(const std::string& name) {
  for (ConditionId id :
       {ConditionId::AnnomFinal, ConditionId::AnnomFinalU,
        ConditionId::AnnomFinalW, ConditionId::Anomaly2,
        ConditionId::AnnomFinalU2})
    if (name == to_string(id)) return id;
  throw std::invalid_argument(
      "unknown condition '" + name +
      "'; expected one of AnnomFinal, AnnomFinalU, AnnomFinalW, Anomaly2, "
      "AnnomFinalU2");
}

bool uses_counterterm(ConditionId id) {
  return id != ConditionId::AnnomFinalW;
}

Rational eta_quarter(const OperatorFamily& fam, const LedgerEntry& e) {
  auto direct = e.direct_eta.find(fam.name);
  if (direct != e.direct_eta.end()) return direct->second.mod1();
  if (fam.sigma_coeff && e.sigma) return (*fam.sigma_coeff * *e.sigma).mod1();
  throw std::invalid_argument("no eta rule of family '" + fam.name +
                              "' covers entry '" + e.name + "'");
}

ConditionReport check_condition(const Ledger& ledger,
                                const OperatorFamily& fam, ConditionId id,
                                const Rational& counterterm,
                                const std::vector<std::string>& entry_names) {
  if (id == ConditionId::AnnomFinalW && !counterterm.is_zero())
    throw std::invalid_argument(
        "AnnomFinalW admits no counterterm; pass zero");
  ConditionReport report;
  report.id = id;
  report.family = fam.name;
  report.counterterm = counterterm;
  for (const auto& name : entry_names) {
    const LedgerEntry& e = ledger.entry(name);
    if (e.dimension != fam.dimension + 1)
      throw std::invalid_argument(
          "entry '" + e.name + "' has dimension " +
          std::to_string(e.dimension) + " but family '" + fam.name +
          "' expects " + std::to_string(fam.dimension + 1));
    CongruenceVerdict v;
    v.entry = e.name;
    v.lhs = (Rational(fam.multiplicity) * eta_quarter(fam, e)).mod1();
    v.rhs = (counterterm * condition_weight(ledger, id, e)).mod1();
    v.residue = (v.lhs - v.rhs).mod1();
    v.pass = v.residue.is_zero();
    report.pass = report.pass && v.pass;
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

std::optional<Rational> solve_counterterm(
    const Ledger& ledger, const OperatorFamily& fam, ConditionId id,
    const std::vector<std::string>& entry_names) {
  if (!uses_counterterm(id))
    throw std::invalid_argument(
        "condition AnnomFinalW has no counterterm to solve for");
  bool constrained = false;
  Coset acc{Rational(0), Rational(1)};
  for (const auto& name : entry_names) {
    const LedgerEntry& e = ledger.entry(name);
    Rational target =
        (Rational(fam.multiplicity) * eta_quarter(fam, e)).mod1();
    Rational w = condition_weight(ledger, id, e);
    if (w.is_zero()) {
      if (!target.is_zero()) return std::nullopt;
      continue;  // no constraint on c from this entry
    }
    // c*w == target (mod 1)  <=>  c in target/w + (1/|w|) Z
    Rational mod = Rational(1) / (w < Rational(0) ? -w : w);
    Coset ce{target / w, mod};
    if (!constrained) {
      acc = ce;
      constrained = true;
    } else {
      auto met = intersect(acc, ce);
      if (!met) return std::nullopt;
      acc = *met;
    }
  }
  if (!constrained) return Rational(0);
  return centered(acc.base, acc.mod);
}

MultiplicityResult min_multiplicity(const Ledger& ledger,
                                    const OperatorFamily& fam, ConditionId id,
                                    const std::vector<std::string>& entry_names,
                                    int lo, int hi) {
  if (lo < 1 || hi < lo)
    throw std::invalid_argument("multiplicity range must satisfy 1 <= lo <= hi");
  for (int nu = lo; nu <= hi; ++nu) {
    OperatorFamily probe = fam;
    probe.multiplicity = nu;
    if (id == ConditionId::AnnomFinalW) {
      if (check_condition(ledger, probe, id, Rational(0), entry_names).pass)
        return {nu, Rational(0), hi};
    } else {
      auto c = solve_counterterm(ledger, probe, id, entry_names);
      if (c) return {nu, *c, hi};
    }
  }
  return {std::nullopt, Rational(0), hi};
}

std::vector<std::string> select_entries(const Ledger& ledger,
                                        EntryScope scope) {
  std::vector<std::string> out;
  for (const auto& e : ledger.entries) {
    if (scope == EntryScope::oriented && !e.orientable) continue;
    if (scope == EntryScope::mapping_torus && !e.mapping_torus) continue;
    out.push_back(e.name);
  }
  return out;
}

}  // namespace gravcs
