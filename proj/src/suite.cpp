#include "gravcs/suite.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gravcs/charclass.hpp"
#include "gravcs/connection.hpp"
#include "gravcs/diffeo.hpp"
#include "gravcs/kernels.hpp"
#include "gravcs/ledger.hpp"
#include "gravcs/mappingtorus.hpp"
#include "gravcs/metric.hpp"
#include "gravcs/variational.hpp"

namespace gravcs {
namespace {

struct Ctx {
  unsigned seed = 0;        // offset added to every frozen draw seed
  double tol = 1.0;         // tolerance scale
  Ledger ledger;
  const OperatorFamily* family = nullptr;
};

struct Check {
  CheckInfo info;
  std::vector<int> grids;  // grid sizes touched, for the environment block
  std::function<void(const Ctx&, CheckResult&)> run;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void put(CheckResult& r, const std::string& name, double v) {
  r.values.emplace_back(name, fmt(v));
}

void put(CheckResult& r, const std::string& name, const std::string& v) {
  r.values.emplace_back(name, v);
}

void put(CheckResult& r, const std::string& name, bool v) {
  r.values.emplace_back(name, v ? "true" : "false");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GridManifold torus3(int n) {
  return GridManifold(3, {n, n, n}, {1, 1, 1}, +1, Topology::torus);
}

GridManifold torus4(int n) {
  return GridManifold(4, {n, n, n, n}, {1, 1, 1, 1}, +1, Topology::torus);
}

const InvariantPolynomial& trsq() {
  static const InvariantPolynomial p = InvariantPolynomial::tr_square();
  return p;
}

Diffeomorphism xy_shear() {
  IntMat B = identity_mat(3);
  B[0][1] = 1;
  return Diffeomorphism::affine(3, {1, 1, 1, 1}, B, {});
}

Diffeomorphism yz_shear() {
  IntMat B = identity_mat(3);
  B[1][2] = 1;
  return Diffeomorphism::affine(3, {1, 1, 1, 1}, B, {});
}

Diffeomorphism x_reflection() {
  IntMat R = identity_mat(3);
  R[0][0] = -1;
  return Diffeomorphism::affine(3, {1, 1, 1, 1}, R, {});
}

// symmetric non-definite direction field: bump perturbation minus the flat
// part
MatrixFormField bump_direction(const GridManifold& g, unsigned seed,
                               double amp) {
  MetricField b = random_bump_metric(g, seed, amp, 1);
  return subtract(b.tensor(), MetricField(g).tensor());
}

// oriented entries whose 1/4 eta comes from the signature rule (no direct
// table value for this family); the counterterm universality statement is
// scoped to exactly these rows
std::vector<std::string> rule_oriented_entries(const Ledger& L,
                                               const OperatorFamily& fam) {
  std::vector<std::string> out;
  for (const LedgerEntry& e : L.entries)
    if (e.orientable && !e.direct_eta.count(fam.name)) out.push_back(e.name);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const std::string& x : v) {
    if (!s.empty()) s += ",";
    s += x;
  }
  return s;
}

// ---------------------------------------------------------------------------
// cs-action

void run_background_shift(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=16; backgrounds seeds {" << 31 + S << "," << 32 + S
     << "} amp 0.05; metrics seeds {" << 7 + S << "," << 8 + S << "} amp 0.08";
  r.inputs = in.str();
  GridManifold g = torus3(16);
  MatrixFormField A0 = random_connection(g, 3, 31 + S, 0.05, 1);
  MatrixFormField A0p = random_connection(g, 3, 32 + S, 0.05, 1);
  double shift = integrate_top(transgression(trsq(), A0, A0p), +1);
  put(r, "shift-integral", shift);
  double worst = 0.0;
  for (unsigned ms : {7u, 8u}) {
    OrientedMetric om{random_bump_metric(g, ms + S, 0.08, 1), +1};
    double resid =
        cs_action(trsq(), om, A0p) - cs_action(trsq(), om, A0) - shift;
    put(r, "residual-metric-" + std::to_string(ms + S), resid);
    worst = std::max(worst, std::fabs(resid));
  }
  r.residual = worst;
  r.tolerance = 1e-6 * c.tol;
  r.pass = worst < r.tolerance;
}

void run_refinement_order(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N in {8,16}; backgrounds seeds {" << 31 + S << "," << 32 + S
     << "} amp 0.05; metrics seeds {" << 7 + S << "," << 8 + S << "} amp 0.08";
  r.inputs = in.str();
  auto resid_at = [&](int n) {
    GridManifold g = torus3(n);
    MatrixFormField A0 = random_connection(g, 3, 31 + S, 0.05, 1);
    MatrixFormField A0p = random_connection(g, 3, 32 + S, 0.05, 1);
    double shift = integrate_top(transgression(trsq(), A0, A0p), +1);
    double worst = 0.0;
    for (unsigned ms : {7u, 8u}) {
      OrientedMetric om{random_bump_metric(g, ms + S, 0.08, 1), +1};
      worst = std::max(worst, std::fabs(cs_action(trsq(), om, A0p) -
                                        cs_action(trsq(), om, A0) - shift));
    }
    return worst;
  };
  double coarse = resid_at(8);
  double fine = resid_at(16);
  put(r, "residual-n8", coarse);
  put(r, "residual-n16", fine);
  put(r, "ratio", fine > 0.0 ? coarse / fine : 0.0);
  r.residual = fine;
  r.tolerance = 1e-12 * c.tol;  // round-off floor for the exact identity
  bool at_floor = coarse < r.tolerance && fine < r.tolerance;
  bool fourth_order = fine > 0.0 && coarse / fine >= 16.0;
  r.pass = at_floor || fourth_order;
}

void run_transgression_closure(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T4 N in {8,16}; backgrounds seeds {" << 101 + S << "," << 202 + S
     << "} amp 0.0008";
  r.inputs = in.str();
  auto resid_at = [&](int n) {
    GridManifold g = torus4(n);
    MatrixFormField A0 = random_connection(g, 3, 101 + S, 0.0008, 1);
    MatrixFormField A1 = random_connection(g, 3, 202 + S, 0.0008, 1);
    FormField resid = chern_weil(trsq(), curvature(A1));
    axpy(resid, -1.0, chern_weil(trsq(), curvature(A0)));
    axpy(resid, -1.0, exterior_derivative(transgression(trsq(), A1, A0)));
    return max_abs(resid.data(), resid.size());
  };
  double coarse = resid_at(8);
  double fine = resid_at(16);
  put(r, "residual-n8", coarse);
  put(r, "residual-n16", fine);
  put(r, "ratio", fine > 0.0 ? coarse / fine : 0.0);
  r.residual = fine;
  r.tolerance = 1e-4 * c.tol;
  // truncation-dominated: halving the spacing must shrink it at the stencil
  // order (nominal 16x; 8x allows pre-asymptotic slack)
  r.pass = fine < r.tolerance && fine > 0.0 && coarse / fine >= 8.0;
}

// ---------------------------------------------------------------------------
// delta

void run_metric_independence(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=24; shear B[0][1]=1; metrics seed " << 81 + S << " amp 0.003, seed "
     << 82 + S << " amp 0.002";
  r.inputs = in.str();
  GridManifold g = torus3(24);
  MatrixFormField A0 = flat_background(g, 3);
  Diffeomorphism phi = xy_shear();
  double d1 =
      delta_phi(trsq(), phi, {random_bump_metric(g, 81 + S, 0.003, 1), +1}, A0);
  double d2 =
      delta_phi(trsq(), phi, {random_bump_metric(g, 82 + S, 0.002, 1), +1}, A0);
  put(r, "delta-metric-1", d1);
  put(r, "delta-metric-2", d2);
  r.residual = std::fabs(d1 - d2);
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_cocycle(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=16; f1 = xy shear + offset 0.2, f2 = yz shear + offset 0.3; "
     << "metric seed " << 91 + S << " amp 0.004";
  r.inputs = in.str();
  GridManifold g = torus3(16);
  MatrixFormField A0 = flat_background(g, 3);
  IntMat B1 = identity_mat(3);
  B1[0][1] = 1;
  IntMat B2 = identity_mat(3);
  B2[1][2] = 1;
  Diffeomorphism f1 = Diffeomorphism::affine(3, {1, 1, 1, 1}, B1, {0.2, 0, 0, 0});
  Diffeomorphism f2 = Diffeomorphism::affine(3, {1, 1, 1, 1}, B2, {0, 0.3, 0, 0});
  OrientedMetric om{random_bump_metric(g, 91 + S, 0.004, 1), +1};
  double d12 = delta_phi(trsq(), compose(f1, f2), om, A0);
  double d1 = delta_phi(trsq(), f1, om, A0);
  double d2 = delta_phi(trsq(), f2, om, A0);
  put(r, "delta-composite", d12);
  put(r, "delta-f1", d1);
  put(r, "delta-f2", d2);
  r.residual = std::fabs(d12 - d1 - d2);
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_isotopy_flows(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=16; metric seed " << 71 + S << " amp 0.02; flow field seed "
     << 73 + S << " amps {0.001,0.002,0.004} time 1";
  r.inputs = in.str();
  GridManifold g = torus3(16);
  MatrixFormField A0 = flat_background(g, 3);
  OrientedMetric om{random_bump_metric(g, 71 + S, 0.02, 1), +1};
  double worst = 0.0;
  for (double amp : {0.001, 0.002, 0.004}) {
    VectorFieldOnM X = random_vector_field(g, 73 + S, amp, 1);
    double d = delta_phi(trsq(), isotopy_flow(X, 1.0), om, A0);
    put(r, "delta-amp-" + fmt(amp), d);
    worst = std::max(worst, std::fabs(d));
  }
  r.residual = worst;
  r.tolerance = 1e-4 * c.tol;
  r.pass = worst < r.tolerance;
}

void run_half_relation(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=20; phi = x reflection o yz shear; metric seed " << 95 + S
     << " amp 0.002";
  r.inputs = in.str();
  GridManifold g = torus3(20);
  MatrixFormField A0 = flat_background(g, 3);
  Diffeomorphism phi = compose(x_reflection(), yz_shear());
  OrientedMetric om{random_bump_metric(g, 95 + S, 0.002, 1), +1};
  double dphi = delta_phi(trsq(), phi, om, A0);
  double dsq = delta_phi(trsq(), compose(phi, phi), om, A0);
  put(r, "delta-phi", dphi);
  put(r, "delta-phi-squared", dsq);
  r.residual = std::fabs(dphi - 0.5 * dsq);
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

// ---------------------------------------------------------------------------
// mapping-torus

void run_agreement(const Ctx& c, CheckResult& r, bool flat, bool yz,
                   double eps) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=16, 32 t-nodes; glue = " << (yz ? "yz" : "xy") << " shear; eps "
     << eps << "; metric "
     << (flat ? std::string("flat")
              : "bump seed " + std::to_string(7 + S) + " amp 0.002");
  r.inputs = in.str();
  GridManifold g = torus3(16);
  OrientedMetric om = flat
                          ? OrientedMetric{MetricField(g), +1}
                          : OrientedMetric{random_bump_metric(g, 7 + S, 0.002, 1), +1};
  Diffeomorphism phi = yz ? yz_shear() : xy_shear();
  double d = delta_phi(trsq(), phi, om, flat_background(g, 3));
  double pn = pontryagin_number(trsq(), build_mapping_torus(phi, om, eps, 32));
  put(r, "delta-3d", d);
  put(r, "characteristic-number-4d", pn);
  put(r, "agreement", std::fabs(d - pn));
  // the criterion asks for agreement and for each side individually small
  r.residual = std::max({std::fabs(d), std::fabs(pn), std::fabs(d - pn)});
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_cutoff_independence(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=12, 24 t-nodes; xy shear; metric seed " << 9 + S
     << " amp 0.003; eps {0.1,0.2}, ramps {quintic,cosine}";
  r.inputs = in.str();
  GridManifold g = torus3(12);
  OrientedMetric om{random_bump_metric(g, 9 + S, 0.003, 1), +1};
  Diffeomorphism phi = xy_shear();
  double p1 = pontryagin_number(trsq(), build_mapping_torus(phi, om, 0.1, 24));
  double p2 = pontryagin_number(trsq(), build_mapping_torus(phi, om, 0.2, 24));
  double pc = pontryagin_number(
      trsq(), build_mapping_torus(phi, om, 0.1, 24, CutoffKind::cosine));
  put(r, "eps-0.1", p1);
  put(r, "eps-0.2", p2);
  put(r, "cosine", pc);
  r.residual = std::max(std::fabs(p1 - p2), std::fabs(p1 - pc));
  r.tolerance = 1e-6 * c.tol;
  r.pass = r.residual < r.tolerance;
}

// ---------------------------------------------------------------------------
// cotton

void run_basicness(const Ctx& c, CheckResult& r, int k) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=24; metric seed " << 7 + S << " amp 0.02; field seed "
     << 10 + k + S << " amp 0.01";
  r.inputs = in.str();
  GridManifold g = torus3(24);
  OrientedMetric om{random_bump_metric(g, 7 + S, 0.02, 1), +1};
  VectorFieldOnM X = random_vector_field(g, 10 + k + S, 0.01, 1);
  MatrixFormField h = lie_derivative_metric(X, om.metric);
  double v = sigma_pairing(trsq(), om, h);
  put(r, "pairing", v);
  r.residual = std::fabs(v);
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_two_route(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=24; metric seed " << 7 + S << " amp 0.02; direction seed "
     << 33 + S << " amp 0.1";
  r.inputs = in.str();
  GridManifold g = torus3(24);
  OrientedMetric om{random_bump_metric(g, 7 + S, 0.02, 1), +1};
  MatrixFormField h = bump_direction(g, 33 + S, 0.1);
  double route_c = cotton_pairing(cotton_classical(om.metric), h, om.orientation);
  double route_s = kCottonNormalization * sigma_pairing(trsq(), om, h);
  double rel = std::fabs(route_c - route_s) / std::fabs(route_c);
  put(r, "classical-route", route_c);
  put(r, "variational-route", route_s);
  put(r, "relative-error", rel);
  r.residual = rel;
  r.tolerance = 1e-3 * c.tol;
  // |route_c| > 0.5 keeps the comparison non-vacuous
  r.pass = rel < r.tolerance && std::fabs(route_c) > 0.5;
}

void run_conformally_flat_pointwise(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=48; conformal factor seed " << 41 + S << " amp 0.01";
  r.inputs = in.str();
  MatrixFormField C =
      cotton_classical(random_conformal_metric(torus3(48), 41 + S, 0.01, 1));
  r.residual = max_abs(C.data(), C.size());
  put(r, "max-abs-cotton", r.residual);
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_conformally_flat_pairings(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=24; conformal factor seed " << 41 + S << " amp 0.02; direction seed "
     << 33 + S << " amp 0.1";
  r.inputs = in.str();
  GridManifold g = torus3(24);
  MetricField cf = random_conformal_metric(g, 41 + S, 0.02, 1);
  MatrixFormField h = bump_direction(g, 33 + S, 0.1);
  double cp = cotton_pairing(cotton_classical(cf), h, +1);
  double sp = sigma_pairing(trsq(), OrientedMetric{cf, +1}, h);
  put(r, "classical-route", cp);
  put(r, "variational-route", sp);
  r.residual = std::max(std::fabs(cp), std::fabs(sp));
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

// ---------------------------------------------------------------------------
// holonomy

void run_homotopic_paths(const Ctx& c, CheckResult& r) {
  const unsigned S = c.seed;
  std::ostringstream in;
  in << "T3 N=12; xy shear; metric seed " << 7 + S
     << " amp 0.002; 17 samples; detour seed " << 55 + S << " amp 0.005";
  r.inputs = in.str();
  GridManifold g = torus3(12);
  OrientedMetric om{random_bump_metric(g, 7 + S, 0.002, 1), +1};
  Diffeomorphism shear = xy_shear();
  double d = delta_phi(trsq(), shear, om, flat_background(g, 3));
  const int m = 17;
  double straight =
      path_integral_sigma(trsq(), linear_path_to_image(shear, om, m));
  OrientedMetric moved = apply_diffeo(shear, om);
  MatrixFormField diff = subtract(moved.metric.tensor(), om.metric.tensor());
  MatrixFormField detour = bump_direction(g, 55 + S, 0.005);
  std::vector<MetricField> wavy;
  for (int k = 0; k < m; ++k) {
    double u = double(k) / (m - 1);
    MetricField s = om.metric.shifted(diff, u);
    axpy(s.tensor(), std::sin(M_PI * u), detour);  // vanishes at the ends
    wavy.push_back(s);
  }
  double detoured = path_integral_sigma(trsq(), MetricPath(wavy, +1, shear));
  put(r, "straight-path", straight);
  put(r, "detoured-path", detoured);
  put(r, "delta-phi", d);
  r.residual = std::max({std::fabs(straight - detoured),
                         std::fabs(straight - d), std::fabs(detoured - d)});
  r.tolerance = 1e-4 * c.tol;
  r.pass = r.residual < r.tolerance;
}

void run_obstruction_detected(const Ctx& c, CheckResult& r) {
  r.inputs =
      "T3 N=8, 16 t-nodes, eps 0.1; flat metric; entries: translation "
      "(0.3,0.1,0) kappa 0, xy shear kappa 0.5, xy shear kappa self, xy shear "
      "kappa absent";
  GridManifold g = torus3(8);
  OrientedMetric flat{MetricField(g), +1};
  Diffeomorphism trans = Diffeomorphism::affine(3, {1, 1, 1, 1},
                                                identity_mat(3), {0.3, 0.1, 0, 0});
  Diffeomorphism shear = xy_shear();
  double p_shear =
      pontryagin_number(trsq(), build_mapping_torus(shear, flat, 0.1, 16));
  std::vector<FlatHolonomyDatum> data{
      {"identity-component", trans, 0.0},
      {"obstructed", shear, 0.5},
      {"self-consistent", shear, p_shear},
      {"no-value", shear, std::nullopt},
  };
  std::vector<HolonomyVerdict> v =
      flat_holonomy_check(trsq(), data, flat, 0.1, 16);
  for (const HolonomyVerdict& h : v) {
    put(r, "distance-" + h.name, h.distance);
    put(r, "pass-" + h.name, h.pass);
  }
  r.residual = std::fabs(v[1].distance - 0.5);
  r.tolerance = 1e-6 * c.tol;
  r.pass = v[0].pass && v[0].distance < 1e-4 * c.tol && !v[1].pass &&
           r.residual < r.tolerance && v[2].pass && v[3].skipped && v[3].pass;
}

// ---------------------------------------------------------------------------
// ledger

std::string ledger_inputs(const Ctx& c, const std::string& scope) {
  std::ostringstream in;
  in << "family " << c.family->name << " (nu " << c.family->multiplicity
     << "); entries " << scope;
  return in.str();
}

void run_weak_k3(const Ctx& c, CheckResult& r) {
  r.inputs = ledger_inputs(c, "K3");
  const Rational q = eta_quarter(*c.family, c.ledger.entry("K3"));
  ConditionReport rep = check_condition(c.ledger, *c.family,
                                        ConditionId::AnnomFinalW, Rational(0),
                                        {"K3"});
  put(r, "quarter-eta", q.str());
  put(r, "lhs", rep.verdicts.at(0).lhs.str());
  put(r, "residue", rep.verdicts.at(0).residue.str());
  put(r, "condition-passes", rep.pass);
  r.exact = true;
  bool ok = q == Rational(1, 2) && !rep.pass;
  r.residual = ok ? 0.0 : 1.0;
  r.pass = ok;
}

void run_universal_counterterm(const Ctx& c, CheckResult& r) {
  std::vector<std::string> names = rule_oriented_entries(c.ledger, *c.family);
  r.inputs = ledger_inputs(c, join(names));
  std::optional<Rational> ct = solve_counterterm(
      c.ledger, *c.family, ConditionId::AnnomFinalU, names);
  put(r, "counterterm", ct ? ct->str() : std::string("none"));
  bool ok = ct.has_value() && *ct == Rational(1, 96);
  if (ct) {
    ConditionReport rep = check_condition(c.ledger, *c.family,
                                          ConditionId::AnnomFinalU, *ct, names);
    put(r, "condition-passes", rep.pass);
    ok = ok && rep.pass;
  }
  r.exact = true;
  r.residual = ok ? 0.0 : 1.0;
  r.pass = ok;
}

void run_min_multiplicity_universal(const Ctx& c, CheckResult& r) {
  std::vector<std::string> names = select_entries(c.ledger, EntryScope::all);
  r.inputs = ledger_inputs(c, join(names));
  MultiplicityResult mr = min_multiplicity(c.ledger, *c.family,
                                           ConditionId::AnnomFinalU2, names);
  put(r, "min-multiplicity", mr.nu ? std::to_string(*mr.nu)
                                   : "none <= " + std::to_string(mr.bound));
  put(r, "witness-counterterm", mr.counterterm.str());
  r.exact = true;
  bool ok = mr.nu.has_value() && *mr.nu == 16;
  r.residual = ok ? 0.0 : 1.0;
  r.pass = ok;
}

void run_min_multiplicity_fibered(const Ctx& c, CheckResult& r) {
  std::vector<std::string> names =
      select_entries(c.ledger, EntryScope::mapping_torus);
  r.inputs = ledger_inputs(c, join(names));
  MultiplicityResult mr = min_multiplicity(c.ledger, *c.family,
                                           ConditionId::AnnomFinal, names);
  put(r, "min-multiplicity", mr.nu ? std::to_string(*mr.nu)
                                   : "none <= " + std::to_string(mr.bound));
  put(r, "witness-counterterm", mr.counterterm.str());
  r.exact = true;
  bool ok = mr.nu.has_value() && *mr.nu == 8;
  r.residual = ok ? 0.0 : 1.0;
  r.pass = ok;
}

void run_weak_implies_universal(const Ctx& c, CheckResult& r) {
  std::vector<std::string> names = rule_oriented_entries(c.ledger, *c.family);
  r.inputs = ledger_inputs(c, join(names)) + "; nu in {32,64}";
  bool ok = true;
  for (int nu : {32, 64}) {
    OperatorFamily fam = *c.family;
    fam.multiplicity = nu;
    ConditionReport w = check_condition(c.ledger, fam,
                                        ConditionId::AnnomFinalW, Rational(0),
                                        names);
    ConditionReport u = check_condition(c.ledger, fam,
                                        ConditionId::AnnomFinalU, Rational(0),
                                        names);
    put(r, "weak-nu-" + std::to_string(nu), w.pass);
    put(r, "universal-zero-ct-nu-" + std::to_string(nu), u.pass);
    // the weak condition must hold at these multiples and imply the
    // counterterm one with c = 0
    ok = ok && w.pass && u.pass;
  }
  r.exact = true;
  r.residual = ok ? 0.0 : 1.0;
  r.pass = ok;
}

// ---------------------------------------------------------------------------
// declarative experiments

using nlohmann::json;

[[noreturn]] void spec_fail(const std::string& where, const std::string& why) {
  throw std::invalid_argument("config error: " + where + ": " + why);
}

const json& need(const json& e, const char* key, const std::string& where) {
  if (!e.contains(key))
    spec_fail(where, std::string("missing field '") + key + "'");
  return e.at(key);
}

std::string need_str(const json& e, const char* key, const std::string& where) {
  const json& v = need(e, key, where);
  if (!v.is_string()) spec_fail(where + "." + key, "must be a string");
  return v.get<std::string>();
}

double need_num(const json& e, const char* key, const std::string& where) {
  const json& v = need(e, key, where);
  if (!v.is_number()) spec_fail(where + "." + key, "must be a number");
  return v.get<double>();
}

unsigned need_seed(const json& e, const std::string& where) {
  const json& v = need(e, "seed", where);
  if (!v.is_number_unsigned())
    spec_fail(where + ".seed", "must be a non-negative integer");
  return v.get<unsigned>();
}

int opt_int(const json& e, const char* key, int dflt, const std::string& where) {
  if (!e.contains(key)) return dflt;
  if (!e.at(key).is_number_integer())
    spec_fail(where + "." + key, "must be an integer");
  return e.at(key).get<int>();
}

double opt_num(const json& e, const char* key, double dflt,
               const std::string& where) {
  if (!e.contains(key)) return dflt;
  if (!e.at(key).is_number())
    spec_fail(where + "." + key, "must be a number");
  return e.at(key).get<double>();
}

MetricField build_metric(const json& spec, const GridManifold& g, unsigned S,
                         const std::string& where) {
  if (!spec.is_object()) spec_fail(where, "must be an object");
  std::string kind = need_str(spec, "kind", where);
  if (kind == "flat") return MetricField(g);
  if (kind != "bump" && kind != "conformal")
    spec_fail(where + ".kind",
              "unknown metric kind '" + kind + "' (flat, bump, conformal)");
  double amp = need_num(spec, "amplitude", where);
  if (amp <= 0.0) spec_fail(where + ".amplitude", "must be positive");
  unsigned seed = need_seed(spec, where);
  int mm = opt_int(spec, "max_mode", 1, where);
  if (mm < 1 || mm > 4) spec_fail(where + ".max_mode", "must be in 1..4");
  return kind == "bump" ? random_bump_metric(g, seed + S, amp, mm)
                        : random_conformal_metric(g, seed + S, amp, mm);
}

std::array<double, 4> offset_of(const json& spec, const std::string& where) {
  std::array<double, 4> c{0, 0, 0, 0};
  if (!spec.contains("offset")) return c;
  const json& o = spec.at("offset");
  if (!o.is_array() || o.size() > 3)
    spec_fail(where + ".offset", "must be an array of up to 3 numbers");
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (!o[i].is_number())
      spec_fail(where + ".offset", "must be an array of numbers");
    c[i] = o[i].get<double>();
  }
  return c;
}

Diffeomorphism build_diffeo(const json& spec, const GridManifold& g,
                            unsigned S, const std::string& where) {
  if (!spec.is_object()) spec_fail(where, "must be an object");
  std::string kind = need_str(spec, "kind", where);
  if (kind == "shear") {
    const json& ax = need(spec, "axes", where);
    if (!ax.is_array() || ax.size() != 2 || !ax[0].is_number_integer() ||
        !ax[1].is_number_integer())
      spec_fail(where + ".axes", "must be an array of two axis indices");
    int i = ax[0].get<int>(), j = ax[1].get<int>();
    if (i < 0 || i > 2 || j < 0 || j > 2 || i == j)
      spec_fail(where + ".axes", "axis indices must be distinct and in 0..2");
    IntMat B = identity_mat(3);
    B[i][j] = 1;
    return Diffeomorphism::affine(3, {1, 1, 1, 1}, B, offset_of(spec, where));
  }
  if (kind == "reflection") {
    int a = opt_int(spec, "axis", 0, where);
    if (a < 0 || a > 2) spec_fail(where + ".axis", "must be in 0..2");
    IntMat B = identity_mat(3);
    B[a][a] = -1;
    return Diffeomorphism::affine(3, {1, 1, 1, 1}, B, offset_of(spec, where));
  }
  if (kind == "translation")
    return Diffeomorphism::affine(3, {1, 1, 1, 1}, identity_mat(3),
                                  offset_of(spec, where));
  if (kind == "flow") {
    double amp = need_num(spec, "amplitude", where);
    if (amp <= 0.0) spec_fail(where + ".amplitude", "must be positive");
    unsigned seed = need_seed(spec, where);
    double time = opt_num(spec, "time", 1.0, where);
    return isotopy_flow(random_vector_field(g, seed + S, amp, 1), time);
  }
  if (kind == "compose") {
    const json& of = need(spec, "of", where);
    if (!of.is_array() || of.size() < 2)
      spec_fail(where + ".of", "must be an array of at least two specs");
    // entries act in list order: of[0] first
    Diffeomorphism d = build_diffeo(of[0], g, S, where + ".of[0]");
    for (std::size_t i = 1; i < of.size(); ++i)
      d = compose(build_diffeo(of[i], g, S,
                               where + ".of[" + std::to_string(i) + "]"),
                  d);
    return d;
  }
  spec_fail(where + ".kind",
            "unknown diffeo kind '" + kind +
                "' (shear, reflection, translation, flow, compose)");
}

InvariantPolynomial build_polynomial(const json& e, const std::string& where,
                                     bool fixed_normalization) {
  if (!e.contains("polynomial")) return InvariantPolynomial::tr_square();
  const json& spec = e.at("polynomial");
  if (!spec.is_object()) spec_fail(where + ".polynomial", "must be an object");
  int m = opt_int(spec, "trace_power", 2, where + ".polynomial");
  double coeff = opt_num(spec, "coefficient", 1.0, where + ".polynomial");
  if (m != 2)
    spec_fail(where + ".polynomial.trace_power",
              "only 2 is integrable on 3-manifolds (the transgression of "
              "tr^m has degree 2m-1)");
  if (fixed_normalization && coeff != 1.0)
    spec_fail(where + ".polynomial.coefficient",
              "the Cotton comparison is calibrated for coefficient 1");
  return InvariantPolynomial::tr_square(coeff);
}

int grid_of(const json& e, const std::string& where) {
  int n = opt_int(e, "grid", 16, where);
  if (n < 6 || n > 64) spec_fail(where + ".grid", "must be in 6..64");
  return n;
}

std::vector<std::string> entries_of(const json& e, const Ctx& ctx,
                                    const std::string& where) {
  if (e.contains("entries")) {
    if (e.contains("scope"))
      spec_fail(where, "give either 'scope' or 'entries', not both");
    const json& list = e.at("entries");
    if (!list.is_array() || list.empty())
      spec_fail(where + ".entries", "must be a nonempty array of entry names");
    std::vector<std::string> names;
    for (const json& n : list) {
      if (!n.is_string())
        spec_fail(where + ".entries", "must be an array of strings");
      try {
        ctx.ledger.entry(n.get<std::string>());
      } catch (const std::exception& ex) {
        spec_fail(where + ".entries", ex.what());
      }
      names.push_back(n.get<std::string>());
    }
    return names;
  }
  std::string scope = "all";
  if (e.contains("scope")) scope = need_str(e, "scope", where);
  if (scope == "all") return select_entries(ctx.ledger, EntryScope::all);
  if (scope == "oriented")
    return select_entries(ctx.ledger, EntryScope::oriented);
  if (scope == "mapping-torus")
    return select_entries(ctx.ledger, EntryScope::mapping_torus);
  if (scope == "rule-oriented")
    return rule_oriented_entries(ctx.ledger, *ctx.family);
  spec_fail(where + ".scope",
            "unknown scope '" + scope +
                "' (all, oriented, mapping-torus, rule-oriented)");
}

// ---------------------------------------------------------------------------
// catalog

std::vector<Check> build_catalog() {
  std::vector<Check> cat;
  auto add = [&](std::string id, std::string summary, std::string detail,
                 std::vector<int> grids,
                 std::function<void(const Ctx&, CheckResult&)> fn) {
    std::string category = id.substr(0, id.find('/'));
    cat.push_back(Check{CheckInfo{std::move(id), std::move(category),
                                  std::move(summary), std::move(detail)},
                        std::move(grids), std::move(fn)});
  };

  add("cs-action/background-shift",
      "changing the reference background shifts the action by a "
      "metric-independent transgression integral",
      "Identity: CS_{p,A0'}(g) - CS_{p,A0}(g) = integral of Tp(A0, A0') for "
      "any metric g.\n"
      "Construction: two random trigonometric backgrounds and two random bump "
      "metrics on the 3-torus at N=16; the residual is the worst metric's "
      "violation.\n"
      "Tolerance: every term is evaluated on the shared nodal derivative "
      "path, so the discrete identity telescopes to round-off (measured "
      "~1e-15); the 1e-6 bound leaves headroom for other seeds.",
      {16}, run_background_shift);

  add("cs-action/refinement-order",
      "the background-shift residual stays at the round-off floor (or decays "
      "at 4th order) when the grid spacing halves",
      "Re-runs the background-shift identity at N=8 and N=16.\n"
      "Because the identity telescopes exactly on the shared derivative path, "
      "its residual is floating-point round-off, not truncation; halving the "
      "spacing therefore cannot be required to shrink it.  The check accepts "
      "a >= 16x drop (the stencil order, had truncation dominated) or both "
      "residuals already below the 1e-12 round-off floor, and fails only if "
      "a genuine discretization error appears.",
      {8, 16}, run_refinement_order);

  add("cs-action/transgression-closure",
      "d Tp(A1,A0) = p(F1) - p(F0) with the residual decaying at the stencil "
      "order",
      "Identity: the exterior derivative of the transgression form equals "
      "the difference of the characteristic forms of the endpoint "
      "curvatures.\n"
      "Construction: two random backgrounds on the 4-torus at N=8 and N=16; "
      "the residual here is genuine stencil truncation (measured 5.7e-5 at "
      "N=16), so it must drop by >= 8x under spacing halving (nominal 16x "
      "for 4th-order stencils) and sit below 1e-4 at N=16.  This is the "
      "non-vacuous refinement companion to cs-action/refinement-order.",
      {8, 16}, run_transgression_closure);

  add("delta/cocycle",
      "the action variation is additive under composition of mapping "
      "classes",
      "Because delta is independent of the metric, the composition rule "
      "collapses to plain additivity: delta(f1 o f2) = delta(f1) + "
      "delta(f2).\n"
      "Construction: xy and yz unit shears with distinct translation "
      "offsets, one bump metric, N=16.\n"
      "Tolerance: 1e-4 (measured 3.9e-7).",
      {16}, run_cocycle);

  add("delta/half-relation",
      "an orientation-reversing class contributes half the value of its "
      "square",
      "Identity: delta_phi = 1/2 delta_{phi^2} when phi reverses "
      "orientation; reversal flips the sign of the action, which halves the "
      "telescoping pullback sum.\n"
      "Construction: phi = x-reflection composed with the yz shear, bump "
      "metric, N=20.\n"
      "Tolerance: 1e-4 (measured 5.6e-5).",
      {20}, run_half_relation);

  add("delta/isotopy-flows",
      "diffeomorphisms isotopic to the identity leave the action unchanged",
      "Identity: delta_phi = 0 for phi in the identity component, since the "
      "action descends to mapping classes.\n"
      "Construction: flows of one random vector field at three amplitudes "
      "(0.001, 0.002, 0.004), bump metric, N=16; residual is the worst "
      "|delta|.\n"
      "Tolerance: 1e-4 (measured <= 1e-5).",
      {16}, run_isotopy_flows);

  add("delta/metric-independence",
      "the action variation of a fixed mapping class does not depend on the "
      "metric",
      "Identity: delta_phi(g1) = delta_phi(g2) for any two metrics; the "
      "difference of the two action differences is a closed-form boundary "
      "term that cancels.\n"
      "Construction: unit xy shear (B = [[1,1,0],[0,1,0],[0,0,1]]) against "
      "two unrelated bump metrics at N=24.\n"
      "Tolerance: 1e-4 (measured 3.6e-5).",
      {24}, run_metric_independence);

  add("cotton/basicness-1",
      "the action 1-form annihilates Lie-derivative directions (field 1)",
      "Identity: sigma_pairing(p, g, L_X g) = 0 for every vector field X - "
      "the action is diffeomorphism invariant, so directions tangent to the "
      "orbit pair to zero.\n"
      "Construction: random bump metric and random vector field (seed offset "
      "1 of 3) at N=24.\n"
      "Tolerance: 1e-4 (measured 1.9e-5).",
      {24}, [](const Ctx& c, CheckResult& r) { run_basicness(c, r, 1); });

  add("cotton/basicness-2",
      "the action 1-form annihilates Lie-derivative directions (field 2)",
      "Same statement as cotton/basicness-1 with the second frozen vector "
      "field draw.",
      {24}, [](const Ctx& c, CheckResult& r) { run_basicness(c, r, 2); });

  add("cotton/basicness-3",
      "the action 1-form annihilates Lie-derivative directions (field 3)",
      "Same statement as cotton/basicness-1 with the third frozen vector "
      "field draw.",
      {24}, [](const Ctx& c, CheckResult& r) { run_basicness(c, r, 3); });

  add("cotton/conformally-flat-pairings",
      "both Cotton routes vanish on a conformally flat metric",
      "The Cotton tensor obstructs conformal flatness in three dimensions, "
      "so a conformally flat metric must send both computation routes - the "
      "classical-formula pairing and the variational pairing - below "
      "tolerance independently.\n"
      "Construction: conformal factor exp-bump metric at N=24, paired "
      "against a fixed bump direction.\n"
      "Tolerance: 1e-4 for each route.",
      {24}, run_conformally_flat_pairings);

  add("cotton/conformally-flat-pointwise",
      "the classical Cotton tensor of a conformally flat metric vanishes "
      "pointwise",
      "Construction: conformal metric at N=48; residual is max |C^{ij}| "
      "over all nodes and components.\n"
      "Tolerance: 1e-4 (measured 4.7e-5; pure stencil truncation).",
      {48}, run_conformally_flat_pointwise);

  add("cotton/two-route",
      "the variational pairing equals -1/2 times the classical Cotton "
      "pairing",
      "Identity: integral of C^{ij} h_{ij} = -1/2 * d/ds CS(g + s h), with "
      "C the classical Cotton density of g.  The -1/2 comes from varying "
      "the quadratic action through the connection (derivation in "
      "docs/cotton_normalization.md).\n"
      "Construction: non-conformally-flat bump metric at N=24 against a "
      "fixed bump direction; the two routes share no code beyond the metric "
      "utilities.\n"
      "Tolerance: relative error 1e-3 (measured 7.3e-6), with signal "
      "|pairing| > 0.5 required so the comparison is non-vacuous.",
      {24}, run_two_route);

  add("holonomy/homotopic-paths",
      "path integrals over homotopic metric paths agree and match the "
      "action variation",
      "The action 1-form is closed, so the line integral over a path from g "
      "to phi.g depends only on the endpoint class: a straight segment and "
      "a detoured path (bump detour scaled by sin(pi u), vanishing at the "
      "ends) must agree, and both must equal delta_phi computed with no "
      "path at all.\n"
      "Construction: xy shear, bump metric, 17 samples, N=12.\n"
      "Tolerance: 1e-4 (measured <= 5e-6).",
      {12}, run_homotopic_paths);

  add("holonomy/obstruction-detected",
      "the holonomy checker passes consistent values, fails kappa = 1/2 "
      "against the shear torus, and skips missing values",
      "flat_holonomy_check compares supplied holonomy values, mod 1, "
      "against the characteristic number of the mapping torus of each glue "
      "map over a flat metric.  A lattice translation with kappa = 0 must "
      "pass; the unit xy shear with kappa = 1/2 must fail at integer "
      "distance 1/2 (its characteristic number vanishes); injecting the "
      "computed number must pass at distance zero; an absent value must be "
      "skipped without failing.\n"
      "Construction: N=8 with 16 t-nodes, eps 0.1.",
      {8}, run_obstruction_detected);

  add("ledger/min-multiplicity-fibered",
      "restricted to the fibered sub-table the smallest passing "
      "multiplicity is exactly 8",
      "The shear mapping torus carries 1/4 eta = 1/8 with vanishing p1, so "
      "no counterterm can help and nu * 1/8 = 0 (mod 1) forces 8 | nu; the "
      "identity torus row adds no constraint.  Exhaustive exact scan over "
      "the mapping-torus entries returns exactly 8.\n"
      "Exact rational arithmetic, zero tolerance.",
      {}, run_min_multiplicity_fibered);

  add("ledger/min-multiplicity-universal",
      "over the full table, with the unorientable entry present, the "
      "smallest passing multiplicity is exactly 16",
      "The unorientable entry RP4 pins 1/4 eta = 1/16 directly and its "
      "orientation double cover S4 has p1 = 0, so the double-cover "
      "condition nu/16 = c * p1(S4)/2 = 0 (mod 1) forces 16 | nu; the "
      "fibered shear row forces 8 | nu, and the remaining rows are solvable "
      "for every nu.  The exhaustive exact scan returns exactly 16.\n"
      "Exact rational arithmetic, zero tolerance.",
      {}, run_min_multiplicity_universal);

  add("ledger/universal-counterterm",
      "one counterterm coefficient, exactly 1/96, cancels the congruence on "
      "every signature-rule oriented entry",
      "Solving nu * q(N) = c * p1(N) (mod 1) simultaneously over the "
      "oriented entries governed by the signature rule (q = sigma/32, and "
      "p1 = 3 sigma for these rows) yields the exact coset representative "
      "c = 1/96, and the condition then passes entry by entry.\n"
      "The fibered shear row is excluded by construction: its 1/4 eta is "
      "pinned directly because the signature rule fails on it, and "
      "including it forces the multiplicity instead (see "
      "ledger/min-multiplicity-fibered).\n"
      "Exact rational arithmetic, zero tolerance.",
      {}, run_universal_counterterm);

  add("ledger/weak-implies-universal",
      "whenever the counterterm-free condition holds, the counterterm "
      "condition holds with c = 0",
      "Strictness ordering: nu*q = 0 (mod 1) is the special case c = 0 of "
      "nu*q = c*p1 (mod 1), so every multiplicity passing the weak "
      "condition passes the counterterm one.  Verified exactly at nu = 32 "
      "and nu = 64, where the weak condition holds on the signature-rule "
      "oriented entries.\n"
      "Exact rational arithmetic, zero tolerance.",
      {}, run_weak_implies_universal);

  add("ledger/weak-k3",
      "K3 has 1/4 eta = 1/2 and defeats the counterterm-free condition",
      "With the shipped rule 1/4 eta = sigma/32 and sigma(K3) = -16, the "
      "quarter eta reduces to 1/2 mod 1, so nu * 1/2 = 0 (mod 1) fails at "
      "nu = 1: the anomaly on K3 cannot cancel without a counterterm.\n"
      "Exact rational arithmetic, zero tolerance.",
      {}, run_weak_k3);

  struct AgreementCase {
    const char* suffix;
    bool flat;
    bool yz;
    double eps;
  };
  for (AgreementCase a : std::initializer_list<AgreementCase>{
           {"bump-xy-eps10", false, false, 0.1},
           {"bump-xy-eps20", false, false, 0.2},
           {"bump-yz-eps10", false, true, 0.1},
           {"bump-yz-eps20", false, true, 0.2},
           {"flat-xy-eps10", true, false, 0.1},
           {"flat-xy-eps20", true, false, 0.2},
           {"flat-yz-eps10", true, true, 0.1},
           {"flat-yz-eps20", true, true, 0.2},
       }) {
    std::ostringstream summary, detail;
    summary << "3-d variation equals the 4-d mapping-torus number ("
            << (a.flat ? "flat" : "bump") << " metric, "
            << (a.yz ? "yz" : "xy") << " shear, eps " << a.eps << ")";
    detail
        << "Identity: delta_phi(g) equals the integral of p of the "
           "interpolated curvature over the fundamental domain of the "
           "mapping torus of phi over g.\n"
           "The two sides are computed by disjoint code paths - two 3-d "
           "action evaluations versus a 4-d curvature integral on a 16^3 x "
           "32 grid - and must agree within 1e-4.  Both sides must also be "
           "below 1e-4 individually: shears act trivially on these metrics' "
           "classes, so the expected value is zero and the vanishing of "
           "each route is part of the claim.\n"
           "This case uses the "
        << (a.flat ? "flat metric" : "bump metric (seed 7, amp 0.002)")
        << ", the " << (a.yz ? "yz" : "xy") << " unit shear, and gluing "
        << "cutoff width " << a.eps << ".";
    bool flat = a.flat, yz = a.yz;
    double eps = a.eps;
    add("mapping-torus/agreement-" + std::string(a.suffix), summary.str(),
        detail.str(), {16},
        [flat, yz, eps](const Ctx& c, CheckResult& r) {
          run_agreement(c, r, flat, yz, eps);
        });
  }

  add("mapping-torus/cutoff-independence",
      "the mapping-torus characteristic number does not depend on the "
      "gluing cutoff",
      "The interpolated connection depends on the cutoff profile chi(t), "
      "but the characteristic number is a difference of transgressions "
      "between the endpoint connections and is cutoff independent.\n"
      "Construction: xy shear over a bump metric at 12^3 x 24; eps 0.1 vs "
      "0.2 and quintic vs cosine ramps.\n"
      "Tolerance: 1e-6 (measured ~5e-9).",
      {12}, run_cutoff_independence);

  std::sort(cat.begin(), cat.end(),
            [](const Check& a, const Check& b) { return a.info.id < b.info.id; });
  return cat;
}

const std::vector<Check>& catalog() {
  static const std::vector<Check> cat = build_catalog();
  return cat;
}

}  // namespace

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const Check& c : catalog()) v.push_back(c.info);
    return v;
  }();
  return infos;
}

std::vector<std::string> check_categories() {
  std::vector<std::string> cats;
  for (const Check& c : catalog())
    if (cats.empty() || cats.back() != c.info.category)
      cats.push_back(c.info.category);
  return cats;
}

std::vector<CheckResult> run_checks(const std::string& selector,
                                    const RunOptions& opt) {
  if (opt.tolerance_scale <= 0.0)
    throw std::invalid_argument("tolerance-scale must be positive");
  if (opt.jobs < 0) throw std::invalid_argument("jobs must be >= 0");

  std::vector<const Check*> selected;
  bool all = selector == "verify-all" || selector == "all";
  for (const Check& c : catalog())
    if (all || c.info.category == selector || c.info.id == selector)
      selected.push_back(&c);
  if (selected.empty()) {
    std::string msg = "unknown check selector '" + selector +
                      "'; expected verify-all, a category (";
    msg += join(check_categories());
    msg += "), or a full check id";
    throw std::invalid_argument(msg);
  }

  Ctx ctx;
  ctx.seed = static_cast<unsigned>(opt.seed);
  ctx.tol = opt.tolerance_scale;
  ctx.ledger = opt.ledger_file.empty() ? builtin_ledger()
                                       : load_ledger(opt.ledger_file);
  ctx.family = &ctx.ledger.family(opt.ledger_family);

#ifdef _OPENMP
  if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
#endif

  std::vector<CheckResult> out;
  out.reserve(selected.size());
  for (const Check* c : selected) {
    CheckResult res;
    res.id = c->info.id;
    res.category = c->info.category;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c->run(ctx, res);
    } catch (const std::exception& e) {
      // a numerical or construction failure belongs in the report
      res.error = e.what();
      res.pass = false;
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.digest = hex64(fnv1a(res.inputs));
    out.push_back(std::move(res));
  }
  return out;
}

std::vector<CheckResult> run_experiments(const nlohmann::json& experiments,
                                         const RunOptions& opt,
                                         const std::string& selector) {
  if (opt.tolerance_scale <= 0.0)
    throw std::invalid_argument("tolerance-scale must be positive");
  if (opt.jobs < 0) throw std::invalid_argument("jobs must be >= 0");
  if (!experiments.is_array())
    throw std::invalid_argument("config error: experiments: must be an array");

  Ctx ctx;
  ctx.seed = static_cast<unsigned>(opt.seed);
  ctx.tol = opt.tolerance_scale;
  ctx.ledger = opt.ledger_file.empty() ? builtin_ledger()
                                       : load_ledger(opt.ledger_file);
  ctx.family = &ctx.ledger.family(opt.ledger_family);

#ifdef _OPENMP
  if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
#endif

  const unsigned S = ctx.seed;
  const bool all = selector == "verify-all" || selector == "all";
  static const std::map<std::string, std::set<std::string>> kind_fields{
      {"cs-action", {"grid", "metric", "polynomial", "backgrounds", "tolerance"}},
      {"delta", {"grid", "metric", "diffeo", "polynomial", "tolerance"}},
      {"mapping-torus",
       {"grid", "metric", "diffeo", "polynomial", "eps", "t_nodes", "tolerance"}},
      {"cotton", {"grid", "metric", "polynomial", "direction", "tolerance"}},
      {"holonomy", {"grid", "metric", "diffeo", "polynomial", "path", "tolerance"}},
      {"ledger",
       {"mode", "condition", "scope", "entries", "counterterm", "expect", "lo",
        "hi"}},
  };

  struct Job {
    CheckResult shell;
    std::function<void(CheckResult&)> run;
  };
  std::vector<Job> jobs;
  std::set<std::string> names;
  // a small grid exercises every grid-dependent validation path cheaply
  GridManifold probe = torus3(8);

  // phase 1: validate and compile every experiment, even unselected ones, so
  // a config error surfaces no matter which subcommand runs
  for (std::size_t idx = 0; idx < experiments.size(); ++idx) {
    const json& e = experiments.at(idx);
    std::string where = "experiments[" + std::to_string(idx) + "]";
    if (!e.is_object()) spec_fail(where, "must be an object");
    std::string name = need_str(e, "name", where);
    if (name.empty()) spec_fail(where + ".name", "must be nonempty");
    for (char ch : name)
      if (!(std::islower(static_cast<unsigned char>(ch)) ||
            std::isdigit(static_cast<unsigned char>(ch)) || ch == '-'))
        spec_fail(where + ".name",
                  "use lower-case letters, digits, and '-' only");
    if (!names.insert(name).second)
      spec_fail(where + ".name", "duplicate experiment name '" + name + "'");
    std::string kind = need_str(e, "kind", where);
    auto kit = kind_fields.find(kind);
    if (kit == kind_fields.end())
      spec_fail(where + ".kind",
                "unknown kind '" + kind +
                    "' (cs-action, delta, mapping-torus, cotton, holonomy, "
                    "ledger)");
    where += " (" + name + ")";
    for (const auto& item : e.items())
      if (item.key() != "name" && item.key() != "kind" &&
          !kit->second.count(item.key()))
        spec_fail(where, "field '" + item.key() + "' does not apply to kind '" +
                             kind + "'");

    Job job;
    job.shell.id = kind + "/custom-" + name;
    job.shell.category = kind;
    job.shell.inputs =
        "custom " + e.dump() + "; seed-offset " + std::to_string(S);

    if (kind == "ledger") {
      std::string mode = "check";
      if (e.contains("mode")) mode = need_str(e, "mode", where);
      if (mode != "check" && mode != "solve" && mode != "min-multiplicity")
        spec_fail(where + ".mode",
                  "unknown mode '" + mode +
                      "' (check, solve, min-multiplicity)");
      ConditionId cid;
      try {
        cid = parse_condition(need_str(e, "condition", where));
      } catch (const std::invalid_argument& ex) {
        spec_fail(where + ".condition", ex.what());
      }
      std::vector<std::string> entry_names = entries_of(e, ctx, where);
      if (e.contains("counterterm") && mode != "check")
        spec_fail(where + ".counterterm", "only applies to mode 'check'");
      if ((e.contains("lo") || e.contains("hi")) && mode != "min-multiplicity")
        spec_fail(where, "'lo'/'hi' only apply to mode 'min-multiplicity'");

      if (mode == "check") {
        Rational ct(0);
        if (e.contains("counterterm")) {
          try {
            ct = Rational::parse(need_str(e, "counterterm", where));
          } catch (const std::exception&) {
            spec_fail(where + ".counterterm",
                      "must be a rational like '1/96'");
          }
        }
        bool expect = true;
        if (e.contains("expect")) {
          if (!e.at("expect").is_boolean())
            spec_fail(where + ".expect", "must be a boolean for mode 'check'");
          expect = e.at("expect").get<bool>();
        }
        job.run = [&ctx, cid, ct, entry_names, expect](CheckResult& r) {
          ConditionReport rep =
              check_condition(ctx.ledger, *ctx.family, cid, ct, entry_names);
          for (const auto& v : rep.verdicts)
            put(r, "residue-" + v.entry, v.residue.str());
          put(r, "condition-passes", rep.pass);
          r.exact = true;
          r.residual = rep.pass == expect ? 0.0 : 1.0;
          r.pass = rep.pass == expect;
        };
      } else if (mode == "solve") {
        bool has_expect = e.contains("expect");
        bool want_none = false;
        Rational want(0);
        if (has_expect) {
          if (!e.at("expect").is_string())
            spec_fail(where + ".expect",
                      "must be a rational string or 'none' for mode 'solve'");
          std::string s = e.at("expect").get<std::string>();
          if (s == "none") {
            want_none = true;
          } else {
            try {
              want = Rational::parse(s);
            } catch (const std::exception&) {
              spec_fail(where + ".expect",
                        "must be a rational like '1/96' or 'none'");
            }
          }
        }
        job.run = [&ctx, cid, entry_names, has_expect, want_none,
                   want](CheckResult& r) {
          std::optional<Rational> got =
              solve_counterterm(ctx.ledger, *ctx.family, cid, entry_names);
          put(r, "counterterm", got ? got->str() : std::string("none"));
          bool ok = has_expect
                        ? (want_none ? !got.has_value()
                                     : got.has_value() && *got == want)
                        : got.has_value();
          r.exact = true;
          r.residual = ok ? 0.0 : 1.0;
          r.pass = ok;
        };
      } else {  // min-multiplicity
        int lo = opt_int(e, "lo", 1, where);
        int hi = opt_int(e, "hi", 64, where);
        if (lo < 1 || hi < lo || hi > 100000)
          spec_fail(where, "need 1 <= lo <= hi <= 100000");
        bool has_expect = e.contains("expect");
        bool want_none = false;
        int want = 0;
        if (has_expect) {
          const json& x = e.at("expect");
          if (x.is_number_integer()) {
            want = x.get<int>();
            if (want < lo || want > hi)
              spec_fail(where + ".expect", "must lie in [lo, hi]");
          } else if (x.is_string() && x.get<std::string>() == "none") {
            want_none = true;
          } else {
            spec_fail(where + ".expect",
                      "must be an integer or 'none' for mode "
                      "'min-multiplicity'");
          }
        }
        job.run = [&ctx, cid, entry_names, lo, hi, has_expect, want_none,
                   want](CheckResult& r) {
          MultiplicityResult mr =
              min_multiplicity(ctx.ledger, *ctx.family, cid, entry_names, lo,
                               hi);
          put(r, "min-multiplicity",
              mr.nu ? std::to_string(*mr.nu)
                    : "none <= " + std::to_string(mr.bound));
          put(r, "witness-counterterm", mr.counterterm.str());
          bool ok = has_expect ? (want_none ? !mr.nu.has_value()
                                            : mr.nu.has_value() && *mr.nu == want)
                               : mr.nu.has_value();
          r.exact = true;
          r.residual = ok ? 0.0 : 1.0;
          r.pass = ok;
        };
      }
    } else {
      double tol = opt_num(e, "tolerance", 1e-4, where);
      if (tol <= 0.0) spec_fail(where + ".tolerance", "must be positive");
      tol *= ctx.tol;
      int N = grid_of(e, where);
      const json mspec = need(e, "metric", where);
      build_metric(mspec, probe, S, where + ".metric");
      InvariantPolynomial P = build_polynomial(e, where, kind == "cotton");

      if (kind == "cs-action") {
        json b = e.contains("backgrounds") ? e.at("backgrounds") : json::object();
        if (!b.is_object()) spec_fail(where + ".backgrounds", "must be an object");
        for (const auto& item : b.items())
          if (item.key() != "seeds" && item.key() != "amplitude")
            spec_fail(where + ".backgrounds",
                      "unknown field '" + item.key() + "'");
        unsigned s1 = 31, s2 = 32;
        if (b.contains("seeds")) {
          const json& ss = b.at("seeds");
          if (!ss.is_array() || ss.size() != 2 || !ss[0].is_number_unsigned() ||
              !ss[1].is_number_unsigned())
            spec_fail(where + ".backgrounds.seeds",
                      "must be two non-negative integers");
          s1 = ss[0].get<unsigned>();
          s2 = ss[1].get<unsigned>();
        }
        double bamp = opt_num(b, "amplitude", 0.05, where + ".backgrounds");
        if (bamp <= 0.0)
          spec_fail(where + ".backgrounds.amplitude", "must be positive");
        job.run = [N, mspec, s1, s2, bamp, P, S, tol, where](CheckResult& r) {
          GridManifold g = torus3(N);
          OrientedMetric om{build_metric(mspec, g, S, where + ".metric"), +1};
          MatrixFormField A0 = random_connection(g, 3, s1 + S, bamp, 1);
          MatrixFormField A0p = random_connection(g, 3, s2 + S, bamp, 1);
          double shift = integrate_top(transgression(P, A0, A0p), +1);
          double ca = cs_action(P, om, A0);
          double cap = cs_action(P, om, A0p);
          put(r, "action-first-background", ca);
          put(r, "action-second-background", cap);
          put(r, "shift-integral", shift);
          r.residual = std::fabs(cap - ca - shift);
          r.tolerance = tol;
          r.pass = r.residual < r.tolerance;
        };
      } else if (kind == "delta") {
        const json dspec = need(e, "diffeo", where);
        build_diffeo(dspec, probe, S, where + ".diffeo");
        job.run = [N, mspec, dspec, P, S, tol, where](CheckResult& r) {
          GridManifold g = torus3(N);
          OrientedMetric om{build_metric(mspec, g, S, where + ".metric"), +1};
          Diffeomorphism phi = build_diffeo(dspec, g, S, where + ".diffeo");
          double d = delta_phi(P, phi, om, flat_background(g, 3));
          put(r, "delta", d);
          r.residual = std::fabs(d);
          r.tolerance = tol;
          r.pass = r.residual < r.tolerance;
        };
      } else if (kind == "mapping-torus") {
        const json dspec = need(e, "diffeo", where);
        build_diffeo(dspec, probe, S, where + ".diffeo");
        int tn = opt_int(e, "t_nodes", 32, where);
        if (tn < 8 || tn > 128) spec_fail(where + ".t_nodes", "must be in 8..128");
        double eps = opt_num(e, "eps", 0.1, where);
        if (eps <= 0.0 || eps >= 0.5)
          spec_fail(where + ".eps", "must be in (0, 0.5)");
        job.run = [N, mspec, dspec, P, S, tn, eps, tol, where](CheckResult& r) {
          GridManifold g = torus3(N);
          OrientedMetric om{build_metric(mspec, g, S, where + ".metric"), +1};
          Diffeomorphism phi = build_diffeo(dspec, g, S, where + ".diffeo");
          double d = delta_phi(P, phi, om, flat_background(g, 3));
          double pn =
              pontryagin_number(P, build_mapping_torus(phi, om, eps, tn));
          put(r, "delta-3d", d);
          put(r, "characteristic-number-4d", pn);
          r.residual = std::fabs(d - pn);
          r.tolerance = tol;
          r.pass = r.residual < r.tolerance;
        };
      } else if (kind == "cotton") {
        json dir = e.contains("direction") ? e.at("direction") : json::object();
        if (!dir.is_object()) spec_fail(where + ".direction", "must be an object");
        for (const auto& item : dir.items())
          if (item.key() != "seed" && item.key() != "amplitude")
            spec_fail(where + ".direction", "unknown field '" + item.key() + "'");
        unsigned dseed = dir.contains("seed") ? need_seed(dir, where + ".direction")
                                              : 33u;
        double damp = opt_num(dir, "amplitude", 0.1, where + ".direction");
        if (damp <= 0.0)
          spec_fail(where + ".direction.amplitude", "must be positive");
        job.run = [N, mspec, dseed, damp, P, S, tol, where](CheckResult& r) {
          GridManifold g = torus3(N);
          OrientedMetric om{build_metric(mspec, g, S, where + ".metric"), +1};
          MatrixFormField h = bump_direction(g, dseed + S, damp);
          double route_c =
              cotton_pairing(cotton_classical(om.metric), h, om.orientation);
          double route_s = kCottonNormalization * sigma_pairing(P, om, h);
          put(r, "classical-route", route_c);
          put(r, "variational-route", route_s);
          r.residual = std::fabs(route_c - route_s);
          r.tolerance = tol;
          r.pass = r.residual < r.tolerance;
        };
      } else {  // holonomy
        const json dspec = need(e, "diffeo", where);
        build_diffeo(dspec, probe, S, where + ".diffeo");
        json p = e.contains("path") ? e.at("path") : json::object();
        if (!p.is_object()) spec_fail(where + ".path", "must be an object");
        for (const auto& item : p.items())
          if (item.key() != "samples")
            spec_fail(where + ".path", "unknown field '" + item.key() + "'");
        int m = opt_int(p, "samples", 17, where + ".path");
        if (m < 3 || m > 129)
          spec_fail(where + ".path.samples", "must be in 3..129");
        job.run = [N, mspec, dspec, P, S, m, tol, where](CheckResult& r) {
          GridManifold g = torus3(N);
          OrientedMetric om{build_metric(mspec, g, S, where + ".metric"), +1};
          Diffeomorphism phi = build_diffeo(dspec, g, S, where + ".diffeo");
          double d = delta_phi(P, phi, om, flat_background(g, 3));
          double s = path_integral_sigma(P, linear_path_to_image(phi, om, m));
          put(r, "path-integral", s);
          put(r, "delta-phi", d);
          r.residual = std::fabs(s - d);
          r.tolerance = tol;
          r.pass = r.residual < r.tolerance;
        };
      }
    }

    if (all || kind == selector || job.shell.id == selector)
      jobs.push_back(std::move(job));
  }

  // phase 2: execute the selected experiments under the run_checks policy
  std::vector<CheckResult> out;
  out.reserve(jobs.size());
  for (Job& j : jobs) {
    CheckResult res = std::move(j.shell);
    auto t0 = std::chrono::steady_clock::now();
    try {
      j.run(res);
    } catch (const std::exception& ex) {
      res.error = ex.what();
      res.pass = false;
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.digest = hex64(fnv1a(res.inputs));
    out.push_back(std::move(res));
  }
  std::sort(out.begin(), out.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  return out;
}

nlohmann::ordered_json make_report(const std::vector<CheckResult>& results,
                                   const std::string& selector,
                                   const RunOptions& opt) {
  nlohmann::ordered_json rep;
  rep["tool"] = "gravcs";
  rep["suite"] = selector;

  std::vector<int> grids;
  for (const CheckResult& res : results)
    for (const Check& c : catalog())
      if (c.info.id == res.id)
        grids.insert(grids.end(), c.grids.begin(), c.grids.end());
  std::sort(grids.begin(), grids.end());
  grids.erase(std::unique(grids.begin(), grids.end()), grids.end());

  nlohmann::ordered_json env;
  env["version"] = kVersion;
  env["seed"] = opt.seed;
  env["tolerance_scale"] = opt.tolerance_scale;
  env["jobs"] = opt.jobs;
  env["ledger_file"] = opt.ledger_file.empty() ? "(builtin)" : opt.ledger_file;
  env["ledger_family"] = opt.ledger_family;
  env["grid_sizes"] = grids;
  rep["environment"] = env;

  int passed = 0;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& res : results) {
    nlohmann::ordered_json o;
    o["id"] = res.id;
    o["inputs"] = res.inputs;
    o["digest"] = res.digest;
    nlohmann::ordered_json vals;
    for (const auto& [k, v] : res.values) vals[k] = v;
    o["values"] = vals;
    o["residual"] = res.residual;
    o["tolerance"] = res.tolerance;
    o["exact"] = res.exact;
    o["pass"] = res.pass;
    if (!res.error.empty()) o["error"] = res.error;
    if (opt.timings) o["seconds"] = res.seconds;
    checks.push_back(o);
    if (res.pass) ++passed;
  }
  rep["checks"] = checks;
  rep["passed"] = passed;
  rep["failed"] = static_cast<int>(results.size()) - passed;
  rep["total"] = static_cast<int>(results.size());
  rep["pass"] = passed == static_cast<int>(results.size());
  return rep;
}

std::string explain_check(const std::string& id) {
  for (const Check& c : catalog())
    if (c.info.id == id)
      return c.info.id + "\n  " + c.info.summary + "\n\n" + c.info.detail +
             "\n";
  std::string msg = "unknown check id '" + id + "'; known ids:\n";
  for (const Check& c : catalog()) msg += "  " + c.info.id + "\n";
  throw std::invalid_argument(msg);
}

}  // namespace gravcs
