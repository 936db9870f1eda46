#pragma once

#include "gravcs/charclass.hpp"
#include "gravcs/diffeo.hpp"
#include "gravcs/metric.hpp"

namespace gravcs {

// shape of the gluing cutoff chi(t): 0 on [0,eps], 1 on [1-eps,1]
enum class CutoffKind { quintic, cosine };

double cutoff_value(CutoffKind kind, double eps, double t);

// The twisted product (M x [0,1]) / (x,0) ~ (phi(x),1), carried as its
// fundamental domain: a 4-d grid with the interval t-axis first, and an
// interpolated connection that equals the metric connection of g near t = 0
// and of phi.g near t = 1.  Since the t = 1 slice is the phi-transform of
// the t = 0 slice, globally defined integrands may be integrated over the
// fundamental domain directly.
struct MappingTorus {
  GridManifold base;          // 4-d, interval axis 0, spatial axes 1..3
  Diffeomorphism glue;
  MatrixFormField omega_bar;  // rank-3 matrix 1-form, no dt component
  double eps;
  int orientation;            // orientation sign of the underlying (M, o)
};

MappingTorus build_mapping_torus(const Diffeomorphism& phi,
                                 const OrientedMetric& g, double eps,
                                 int t_nodes,
                                 CutoffKind cutoff = CutoffKind::quintic);

// integral of the characteristic form of the interpolated curvature over the
// fundamental domain; requires an orientation-preserving glue
double pontryagin_number(const InvariantPolynomial& p, const MappingTorus& mt);

// mapping torus of phi^2, the orientation double cover for reversing phi
MappingTorus double_cover(const Diffeomorphism& phi, const OrientedMetric& g,
                          double eps, int t_nodes,
                          CutoffKind cutoff = CutoffKind::quintic);

}  // namespace gravcs
