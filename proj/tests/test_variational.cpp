#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gravcs/charclass.hpp"
#include "gravcs/connection.hpp"
#include "gravcs/diffeo.hpp"
#include "gravcs/kernels.hpp"
#include "gravcs/mappingtorus.hpp"
#include "gravcs/metric.hpp"
#include "gravcs/variational.hpp"

using namespace gravcs;

namespace {

GridManifold torus3(int n) {
  return GridManifold(3, {n, n, n}, {1, 1, 1}, +1, Topology::torus);
}

const InvariantPolynomial kTrSq = InvariantPolynomial::tr_square();

// symmetric non-definite direction field: bump perturbation without the flat
// part
MatrixFormField bump_direction(const GridManifold& g, unsigned seed,
                               double amp) {
  MetricField b = random_bump_metric(g, seed, amp, 1);
  return subtract(b.tensor(), MetricField(g).tensor());
}

// push a direction field through phi by riding a metric container
MatrixFormField transform_direction(const Diffeomorphism& phi,
                                    const GridManifold& g,
                                    const MatrixFormField& h) {
  MetricField carrier(g);
  carrier.drop_generator();
  for (std::int64_t i = 0; i < h.size(); ++i)
    carrier.tensor().data()[i] = h.data()[i];
  return apply_diffeo(phi, OrientedMetric{carrier, +1}).metric.tensor();
}

Diffeomorphism xy_shear() {
  IntMat B = identity_mat(3);
  B[0][1] = 1;
  return Diffeomorphism::affine(3, {1, 1, 1, 1}, B, {});
}

}  // namespace

TEST_CASE("pairing vanishes on Lie derivative directions") {
  GridManifold g = torus3(24);
  OrientedMetric om{random_bump_metric(g, 7, 0.02, 1), +1};
  for (unsigned xs : {11u, 12u, 13u}) {
    VectorFieldOnM X = random_vector_field(g, xs, 0.01, 1);
    MatrixFormField h = lie_derivative_metric(X, om.metric);
    CHECK(std::fabs(sigma_pairing(kTrSq, om, h)) < 1e-4);  // measured 1.9e-5
  }
}

TEST_CASE("pairing vanishes in the homothety direction") {
  GridManifold g = torus3(16);
  OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
  MatrixFormField h = om.metric.tensor();
  // the action is scale invariant, so the radial derivative is round-off
  CHECK(std::fabs(sigma_pairing(kTrSq, om, h)) < 1e-8);  // measured 2.3e-13
}

TEST_CASE("pairing is linear in the direction") {
  GridManifold g = torus3(16);
  OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
  MatrixFormField h1 = bump_direction(g, 21, 0.1);
  MatrixFormField h2 = bump_direction(g, 22, 0.1);
  MatrixFormField combo(g, 0, 3);
  axpy(combo, 1.7, h1);
  axpy(combo, -0.6, h2);
  double s1 = sigma_pairing(kTrSq, om, h1);
  double s2 = sigma_pairing(kTrSq, om, h2);
  CHECK(std::fabs(s2) > 0.5);  // nontrivial scale behind the identity
  CHECK(std::fabs(sigma_pairing(kTrSq, om, combo) - (1.7 * s1 - 0.6 * s2)) <
        1e-9);  // measured 1.3e-12
}

TEST_CASE("pairing of the zero direction is exactly zero") {
  GridManifold g = torus3(8);
  OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
  CHECK(sigma_pairing(kTrSq, om, MatrixFormField(g, 0, 3)) == 0.0);
}

TEST_CASE("pairing shrinks its step on positivity failures") {
  GridManifold g = torus3(8);
  MetricField gm(g);
  gm.drop_generator();
  gm.at(0, 2, 2) = 1e-6;  // near-degenerate node breaks the default step
  MatrixFormField h = bump_direction(g, 21, 0.1);
  double v = sigma_pairing(kTrSq, OrientedMetric{gm, +1}, h);
  CHECK(std::isfinite(v));
  CHECK(v != 0.0);
}

TEST_CASE("pairing errors once the step underflows") {
  GridManifold g = torus3(8);
  MetricField gm(g);
  gm.drop_generator();
  gm.at(0, 2, 2) = 1e-300;  // no positive step can keep this definite
  MatrixFormField h = bump_direction(g, 21, 0.1);
  CHECK_THROWS_WITH_AS(sigma_pairing(kTrSq, OrientedMetric{gm, +1}, h),
                       doctest::Contains("underflow"), std::runtime_error);
}

TEST_CASE("pairing validates the direction shape") {
  GridManifold g = torus3(12);
  OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
  CHECK_THROWS_AS(sigma_pairing(kTrSq, om, bump_direction(torus3(8), 21, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sigma_pairing(kTrSq, om, MatrixFormField(g, 1, 3)),
                  std::invalid_argument);
}

TEST_CASE("classical Cotton tensor of the flat metric vanishes exactly") {
  MatrixFormField C = cotton_classical(MetricField(torus3(8)));
  CHECK(max_abs(C.data(), C.size()) == 0.0);
}

TEST_CASE("Cotton tensor rejects non-3-dimensional metrics") {
  GridManifold g4(4, {6, 6, 6, 6}, {1, 1, 1, 1}, +1, Topology::torus);
  CHECK_THROWS_AS(cotton_classical(MetricField(g4)), std::invalid_argument);
}

TEST_CASE("the two Cotton routes agree") {
  // classical-formula pairing against the variational route
  for (int n : {16, 24}) {
    GridManifold g = torus3(n);
    OrientedMetric om{random_bump_metric(g, 7, 0.02, 1), +1};
    MatrixFormField h = bump_direction(g, 33, 0.1);
    double route_c = cotton_pairing(cotton_classical(om.metric), h,
                                    om.orientation);
    double route_s = kCottonNormalization * sigma_pairing(kTrSq, om, h);
    CHECK(std::fabs(route_c) > 0.5);  // non-conformally-flat: genuine signal
    double rel = std::fabs(route_c - route_s) / std::fabs(route_c);
    CHECK(rel < 1e-3);                // the contract bound
    if (n == 24) CHECK(rel < 1e-4);   // measured 7.3e-6
  }
}

TEST_CASE("Cotton tensor of conformally flat metrics vanishes") {
  // pointwise at fine resolution
  MatrixFormField C48 =
      cotton_classical(random_conformal_metric(torus3(48), 41, 0.01, 1));
  CHECK(max_abs(C48.data(), C48.size()) < 1e-4);  // measured 4.7e-5
  // both pairing routes below tolerance on a coarser grid
  GridManifold g = torus3(24);
  MetricField cf = random_conformal_metric(g, 41, 0.02, 1);
  MatrixFormField h = bump_direction(g, 33, 0.1);
  CHECK(std::fabs(cotton_pairing(cotton_classical(cf), h, +1)) < 1e-4);
  CHECK(std::fabs(sigma_pairing(kTrSq, OrientedMetric{cf, +1}, h)) < 1e-4);
}

TEST_CASE("Cotton tensor is symmetric, trace-free and divergence-free") {
  GridManifold g = torus3(48);
  MetricField gm = random_bump_metric(g, 7, 0.0005, 1);
  gm.drop_generator();
  MatrixFormField C = cotton_classical(gm);
  CHECK(max_abs(C.data(), C.size()) > 0.1);  // measured 0.80
  MatrixFormField w = levi_civita(gm);
  MatrixFormField dC[3] = {partial_derivative(C, 0), partial_derivative(C, 1),
                           partial_derivative(C, 2)};
  double asym = 0, tr = 0, dv = 0;
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    double t = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        asym = std::max(asym, std::fabs(C.at(node, 0, i, j) -
                                        C.at(node, 0, j, i)));
        t += gm.at(node, i, j) * C.at(node, 0, i, j);
      }
    tr = std::max(tr, std::fabs(t));
    // density divergence: d_i C^{ij} + Gamma^j_{ik} C^{ik}
    for (int j = 0; j < 3; ++j) {
      double d = 0;
      for (int i = 0; i < 3; ++i) {
        d += dC[i].at(node, 0, i, j);
        for (int k = 0; k < 3; ++k)
          d += w.at(node, i, j, k) * C.at(node, 0, i, k);
      }
      dv = std::max(dv, std::fabs(d));
    }
  }
  CHECK(asym == 0.0);  // symmetrized by construction
  CHECK(tr < 1e-5);    // measured 2.1e-7
  CHECK(dv < 1e-4);    // measured 5.0e-6
}

TEST_CASE("the action 1-form is closed along two-parameter families") {
  GridManifold g = torus3(16);
  OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
  MatrixFormField h1 = bump_direction(g, 21, 0.03);
  MatrixFormField h2 = bump_direction(g, 22, 0.03);
  double t1 = 1e-3 * om.metric.rms_norm() / rms(h1.data(), h1.size());
  double t2 = 1e-3 * om.metric.rms_norm() / rms(h2.data(), h2.size());
  auto at = [&](const MatrixFormField& dir, double s) {
    return OrientedMetric{om.metric.shifted(dir, s), +1};
  };
  double m12 = (sigma_pairing(kTrSq, at(h1, t1), h2) -
                sigma_pairing(kTrSq, at(h1, -t1), h2)) /
               (2 * t1);
  double m21 = (sigma_pairing(kTrSq, at(h2, t2), h1) -
                sigma_pairing(kTrSq, at(h2, -t2), h1)) /
               (2 * t2);
  CHECK(std::fabs(m12) > 0.5);             // mixed second derivative ~1.15
  CHECK(std::fabs(m12 - m21) < 1e-5);      // measured 5.0e-7
}

TEST_CASE("pairing is invariant under orientation-preserving maps") {
  // mode-preserving rotation: exact to round-off
  {
    GridManifold g = torus3(16);
    OrientedMetric om{random_bump_metric(g, 7, 0.05, 1), +1};
    MatrixFormField h = bump_direction(g, 21, 0.1);
    IntMat R = identity_mat(3);
    R[0][0] = 0; R[0][1] = -1; R[1][0] = 1; R[1][1] = 0;
    Diffeomorphism phi =
        Diffeomorphism::affine(3, {1, 1, 1, 1}, R, {0.25, 0, 0.5, 0});
    double a = sigma_pairing(kTrSq, om, h);
    double b = sigma_pairing(kTrSq, apply_diffeo(phi, om),
                             transform_direction(phi, g, h));
    CHECK(std::fabs(a - b) < 1e-9);  // measured 2.0e-12
  }
  // perturbed map: interpolation truncation only
  {
    GridManifold g = torus3(24);
    OrientedMetric om{random_bump_metric(g, 7, 0.02, 1), +1};
    MatrixFormField h = bump_direction(g, 21, 0.03);
    std::vector<TrigPoly> fs;
    for (int i = 0; i < 3; ++i)
      fs.push_back(random_trig_poly(g, 61 + i, 0.008, 1, 2));
    Diffeomorphism phi = Diffeomorphism::perturbed(
        3, {1, 1, 1, 1}, identity_mat(3), {0.3, 0, 0, 0}, fs);
    double a = sigma_pairing(kTrSq, om, h);
    double b = sigma_pairing(kTrSq, apply_diffeo(phi, om),
                             transform_direction(phi, g, h));
    CHECK(std::fabs(a - b) < 1e-4);  // measured 2.1e-5
  }
}

TEST_CASE("metric path construction validates its input") {
  GridManifold g = torus3(8);
  MetricField flat(g);
  CHECK_THROWS_AS(MetricPath({flat}, +1), std::invalid_argument);
  CHECK_THROWS_AS(MetricPath({flat, MetricField(torus3(6))}, +1),
                  std::invalid_argument);
  MetricField bad(g);
  bad.drop_generator();
  bad.at(3, 0, 0) = -1.0;
  CHECK_THROWS_AS(MetricPath({flat, bad, flat}, +1), std::runtime_error);
  // declared endpoint relation that the samples do not satisfy
  CHECK_THROWS_WITH_AS(
      MetricPath({flat, random_bump_metric(g, 9, 0.05, 1)}, +1, xy_shear()),
      doctest::Contains("endpoint"), std::invalid_argument);
  // and the integral itself needs at least 3 samples
  MetricPath two({flat, flat}, +1);
  CHECK_THROWS_AS(path_integral_sigma(kTrSq, two), std::invalid_argument);
}

TEST_CASE("path integral over a constant path is exactly zero") {
  GridManifold g = torus3(8);
  MetricField gm = random_bump_metric(g, 7, 0.05, 1);
  MetricPath constant({gm, gm, gm, gm, gm}, +1);
  CHECK(path_integral_sigma(kTrSq, constant) == 0.0);
}

TEST_CASE("free path integral telescopes to the endpoint difference") {
  GridManifold g = torus3(12);
  MatrixFormField A0 = flat_background(g, 3);
  OrientedMetric om{random_bump_metric(g, 7, 0.002, 1), +1};
  MetricField far = random_bump_metric(g, 8, 0.003, 1);
  MetricField e0 = om.metric;
  e0.drop_generator();
  MetricField e1 = far;
  e1.drop_generator();
  double ftc = cs_action(kTrSq, OrientedMetric{e1, +1}, A0) -
               cs_action(kTrSq, OrientedMetric{e0, +1}, A0);
  for (int m : {9, 17}) {
    double li = path_integral_sigma(kTrSq, linear_metric_path(om, far, m));
    CHECK(std::fabs(li - ftc) < 1e-8);  // measured 1.4e-12
  }
}

TEST_CASE("glue-class path integral equals the action variation") {
  GridManifold g = torus3(12);
  MatrixFormField A0 = flat_background(g, 3);
  OrientedMetric om{random_bump_metric(g, 7, 0.002, 1), +1};
  Diffeomorphism shear = xy_shear();
  double d = delta_phi(kTrSq, shear, om, A0);
  double l9 = path_integral_sigma(kTrSq, linear_path_to_image(shear, om, 9));
  double l17 = path_integral_sigma(kTrSq, linear_path_to_image(shear, om, 17));
  CHECK(std::fabs(l9 - d) < 1e-4);   // measured 2.7e-6
  CHECK(std::fabs(l17 - d) < 1e-5);  // measured 2.3e-7, ~4th order in 1/m
}

TEST_CASE("homotopic glue-class paths integrate to the same value") {
  GridManifold g = torus3(12);
  OrientedMetric om{random_bump_metric(g, 7, 0.002, 1), +1};
  Diffeomorphism shear = xy_shear();
  OrientedMetric moved = apply_diffeo(shear, om);
  MatrixFormField diff = subtract(moved.metric.tensor(), om.metric.tensor());
  MatrixFormField detour = bump_direction(g, 55, 0.005);
  const int m = 17;
  std::vector<MetricField> wavy, repar;
  for (int k = 0; k < m; ++k) {
    double u = double(k) / (m - 1);
    MetricField s = om.metric.shifted(diff, u);
    axpy(s.tensor(), std::sin(M_PI * u), detour);  // vanishes at the ends
    wavy.push_back(s);
    double tau = u * u * (3 - 2 * u);  // smoothstep reparametrization
    repar.push_back(om.metric.shifted(diff, tau));
  }
  double straight =
      path_integral_sigma(kTrSq, linear_path_to_image(shear, om, m));
  double detoured = path_integral_sigma(kTrSq, MetricPath(wavy, +1, shear));
  double resampled = path_integral_sigma(kTrSq, MetricPath(repar, +1, shear));
  CHECK(std::fabs(straight - detoured) < 1e-4);   // measured 4.8e-6
  CHECK(std::fabs(straight - resampled) < 1e-5);  // measured 3.7e-7
}

TEST_CASE("integer distance folds to the nearest integer") {
  CHECK(integer_distance(0.0) == 0.0);
  CHECK(integer_distance(3.0) == 0.0);
  CHECK(integer_distance(0.4) == doctest::Approx(0.4));
  CHECK(integer_distance(0.6) == doctest::Approx(0.4));
  CHECK(integer_distance(-0.3) == doctest::Approx(0.3));
  CHECK(integer_distance(1.75) == doctest::Approx(0.25));
}

TEST_CASE("holonomy checker compares supplied values against the bundle") {
  GridManifold g = torus3(8);
  OrientedMetric flat{MetricField(g), +1};
  Diffeomorphism trans = Diffeomorphism::affine(3, {1, 1, 1, 1},
                                                identity_mat(3), {0.3, 0.1, 0, 0});
  Diffeomorphism shear = xy_shear();
  double p_shear =
      pontryagin_number(kTrSq, build_mapping_torus(shear, flat, 0.1, 16));
  std::vector<FlatHolonomyDatum> data{
      {"identity-component", trans, 0.0},
      {"obstructed", shear, 0.5},
      {"self-consistent", shear, p_shear},
      {"no-value", shear, std::nullopt},
  };
  std::vector<HolonomyVerdict> v =
      flat_holonomy_check(kTrSq, data, flat, 0.1, 16);
  REQUIRE(v.size() == 4);
  CHECK(v[0].pass);
  CHECK(v[0].distance < 1e-4);  // both sides vanish
  CHECK_FALSE(v[1].pass);
  CHECK(v[1].distance == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(v[2].pass);
  CHECK(v[2].distance == 0.0);  // injected the computed value
  CHECK(v[3].skipped);
  CHECK(v[3].pass);  // a skip must not poison the family verdict
}
