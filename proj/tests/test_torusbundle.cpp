#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "gravcs/charclass.hpp"
#include "gravcs/connection.hpp"
#include "gravcs/diffeo.hpp"
#include "gravcs/kernels.hpp"
#include "gravcs/mappingtorus.hpp"
#include "gravcs/metric.hpp"

using namespace gravcs;

namespace {

GridManifold torus3(int n) {
  return GridManifold(3, {n, n, n}, {1, 1, 1}, +1, Topology::torus);
}

const InvariantPolynomial kTrSq = InvariantPolynomial::tr_square();

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

}  // namespace

TEST_CASE("cutoff ramps are clamped and monotone") {
  for (CutoffKind kind : {CutoffKind::quintic, CutoffKind::cosine}) {
    CHECK(cutoff_value(kind, 0.1, 0.0) == 0.0);
    CHECK(cutoff_value(kind, 0.1, 0.1) == 0.0);
    CHECK(cutoff_value(kind, 0.1, 0.9) == 1.0);
    CHECK(cutoff_value(kind, 0.1, 1.0) == 1.0);
    CHECK(cutoff_value(kind, 0.1, 0.5) == doctest::Approx(0.5));
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
      double v = cutoff_value(kind, 0.1, i / 40.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("identity glue gives a t-independent connection") {
  GridManifold g = torus3(8);
  OrientedMetric om{random_bump_metric(g, 5, 0.05, 1), +1};
  MappingTorus mt = build_mapping_torus(
      Diffeomorphism::identity(3, {1, 1, 1, 1}), om, 0.15, 16);
  std::int64_t slice = g.node_count();
  // every t-slice matches the t = 0 slice
  double drift = 0.0;
  for (std::int64_t node = 0; node < mt.base.node_count(); ++node)
    for (int c = 0; c < 4; ++c)
      for (int e = 0; e < 9; ++e)
        drift = std::max(drift,
                         std::fabs(mt.omega_bar.block(node, c)[e] -
                                   mt.omega_bar.block(node % slice, c)[e]));
  CHECK(drift < 1e-14);
  // curvature components with a dt leg vanish (combos 01, 02, 03 lead)
  MatrixFormField F = curvature(mt.omega_bar);
  double dt_part = 0.0;
  for (std::int64_t node = 0; node < mt.base.node_count(); ++node)
    for (int c = 0; c < 3; ++c)
      for (int e = 0; e < 9; ++e)
        dt_part = std::max(dt_part, std::fabs(F.block(node, c)[e]));
  CHECK(dt_part < 1e-11);
  CHECK(std::fabs(pontryagin_number(kTrSq, mt)) < 1e-6);
}

TEST_CASE("translations of the flat metric give the zero connection") {
  GridManifold g = torus3(8);
  OrientedMetric om{MetricField(g), +1};
  Diffeomorphism t = Diffeomorphism::affine(3, {1, 1, 1, 1}, identity_mat(3),
                                            {0.3, 0.1, 0.7, 0});
  MappingTorus mt = build_mapping_torus(t, om, 0.1, 16);
  // the pullback interpolates, so zero survives only to round-off
  CHECK(max_abs(mt.omega_bar.data(), mt.omega_bar.size()) < 1e-12);
  CHECK(std::fabs(pontryagin_number(kTrSq, mt)) < 1e-12);
}

TEST_CASE("endpoint slices reproduce the two metric connections exactly") {
  GridManifold g = torus3(8);
  OrientedMetric om{random_bump_metric(g, 11, 0.05, 1), +1};
  Diffeomorphism phi = xy_shear();
  MappingTorus mt = build_mapping_torus(phi, om, 0.2, 16);

  MetricField base = om.metric;
  base.drop_generator();
  MatrixFormField w0 = levi_civita(base);
  OrientedMetric moved = apply_diffeo(phi, om);
  moved.metric.drop_generator();
  MatrixFormField w1 = levi_civita(moved.metric);

  std::int64_t slice = g.node_count();
  std::int64_t top = (16 - 1) * slice;
  for (std::int64_t s = 0; s < slice; ++s)
    for (int c = 0; c < 3; ++c) {
      CHECK(std::memcmp(mt.omega_bar.block(s, c + 1), w0.block(s, c),
                        9 * sizeof(double)) == 0);
      CHECK(std::memcmp(mt.omega_bar.block(top + s, c + 1), w1.block(s, c),
                        9 * sizeof(double)) == 0);
      // no dt components anywhere
      CHECK(max_abs(mt.omega_bar.block(s, 0), 9) == 0.0);
    }
}

TEST_CASE("shears of the flat metric have vanishing characteristic number") {
  GridManifold g = torus3(8);
  OrientedMetric om{MetricField(g), +1};
  MappingTorus mt = build_mapping_torus(xy_shear(), om, 0.1, 16);
  // the sheared flat metric is constant, so both glued connections vanish
  // up to interpolation round-off
  CHECK(max_abs(mt.omega_bar.data(), mt.omega_bar.size()) < 1e-12);
  CHECK(std::fabs(pontryagin_number(kTrSq, mt)) < 1e-12);
}

TEST_CASE("characteristic number equals the action variation") {
  GridManifold g = torus3(16);
  MatrixFormField A0 = flat_background(g, 3);
  Diffeomorphism phi = xy_shear();
  for (double amp : {0.0015, 0.002}) {
    OrientedMetric om{random_bump_metric(g, 7, amp, 1), +1};
    double d = delta_phi(kTrSq, phi, om, A0);
    CHECK(std::fabs(d) < 1e-4);
    for (double eps : {0.1, 0.2}) {
      double pn = pontryagin_number(kTrSq, build_mapping_torus(phi, om, eps, 32));
      CHECK(std::fabs(pn) < 1e-4);
      // the 3-d and 4-d routes agree to quadrature round-off (measured 9e-11)
      CHECK(std::fabs(d - pn) < 1e-8);
    }
  }
}

TEST_CASE("characteristic number is independent of the cutoff data") {
  GridManifold g = torus3(12);
  OrientedMetric om{random_bump_metric(g, 9, 0.003, 1), +1};
  Diffeomorphism phi = xy_shear();
  double p1 = pontryagin_number(kTrSq, build_mapping_torus(phi, om, 0.1, 24));
  double p2 = pontryagin_number(kTrSq, build_mapping_torus(phi, om, 0.2, 24));
  double pc = pontryagin_number(
      kTrSq, build_mapping_torus(phi, om, 0.1, 24, CutoffKind::cosine));
  CHECK(std::fabs(p1 - p2) < 1e-6);  // measured 5.2e-9
  CHECK(std::fabs(p1 - pc) < 1e-6);  // measured 2.7e-9
}

TEST_CASE("characteristic number is independent of the metric") {
  GridManifold g = torus3(16);
  Diffeomorphism phi = xy_shear();
  OrientedMetric g1{random_bump_metric(g, 7, 0.002, 1), +1};
  OrientedMetric g2{random_bump_metric(g, 19, 0.0015, 1), +1};
  double p1 = pontryagin_number(kTrSq, build_mapping_torus(phi, g1, 0.1, 32));
  double p2 = pontryagin_number(kTrSq, build_mapping_torus(phi, g2, 0.1, 32));
  CHECK(std::fabs(p1 - p2) < 1e-4);  // measured 5.6e-6
}

TEST_CASE("characteristic number is additive in the glue") {
  GridManifold g = torus3(16);
  OrientedMetric om{random_bump_metric(g, 19, 0.0015, 1), +1};
  Diffeomorphism f1 = xy_shear(), f2 = yz_shear();
  double pab =
      pontryagin_number(kTrSq, build_mapping_torus(compose(f1, f2), om, 0.1, 32));
  double pa = pontryagin_number(kTrSq, build_mapping_torus(f1, om, 0.1, 32));
  double pb = pontryagin_number(kTrSq, build_mapping_torus(f2, om, 0.1, 32));
  CHECK(std::fabs(pab - pa - pb) < 1e-4);  // measured 1.0e-7
}

TEST_CASE("double cover of a reflection closes up to the identity torus") {
  GridManifold g = torus3(8);
  OrientedMetric om{MetricField(g), +1};
  Diffeomorphism refl = x_reflection();
  CHECK(refl.orientation() == -1);
  MappingTorus cover = double_cover(refl, om, 0.1, 16);
  CHECK(cover.glue.orientation() == +1);  // squares always preserve
  CHECK(std::fabs(pontryagin_number(kTrSq, cover)) < 1e-6);
}

TEST_CASE("reversing variation is half the double-cover characteristic number") {
  GridManifold g = torus3(20);
  MatrixFormField A0 = flat_background(g, 3);
  Diffeomorphism phi = compose(x_reflection(), yz_shear());
  OrientedMetric om{random_bump_metric(g, 95, 0.002, 1), +1};
  double d = delta_phi(kTrSq, phi, om, A0);
  double pn = pontryagin_number(kTrSq, double_cover(phi, om, 0.1, 40));
  CHECK(std::fabs(d - 0.5 * pn) < 1e-4);  // measured 5.6e-5
}

TEST_CASE("mapping torus construction validates its inputs") {
  GridManifold g = torus3(8);
  OrientedMetric om{MetricField(g), +1};
  Diffeomorphism id = Diffeomorphism::identity(3, {1, 1, 1, 1});
  CHECK_THROWS_AS(build_mapping_torus(id, om, 0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(build_mapping_torus(id, om, 0.5, 16), std::invalid_argument);
  CHECK_THROWS_AS(build_mapping_torus(id, om, 0.1, 6), std::invalid_argument);
  // eps leaves fewer than 5 ramp nodes at this t resolution
  CHECK_THROWS_WITH_AS(build_mapping_torus(id, om, 0.45, 12),
                       doctest::Contains("ramp"), std::invalid_argument);

  MappingTorus mt = build_mapping_torus(x_reflection(), om, 0.1, 16);
  CHECK_THROWS_WITH_AS(pontryagin_number(kTrSq, mt),
                       doctest::Contains("double cover"), std::runtime_error);
  CHECK_THROWS_WITH_AS(double_cover(id, om, 0.1, 16),
                       doctest::Contains("no double cover"),
                       std::invalid_argument);
  CHECK_THROWS_AS(
      pontryagin_number(InvariantPolynomial::tr_power(4),
                        build_mapping_torus(id, om, 0.1, 16)),
      std::invalid_argument);
}
