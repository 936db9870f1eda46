#include "gravcs/mappingtorus.hpp"

#include <cmath>
#include <stdexcept>

#include "gravcs/connection.hpp"
#include "gravcs/kernels.hpp"

namespace gravcs {

double cutoff_value(CutoffKind kind, double eps, double t) {
  double u = (t - eps) / (1.0 - 2.0 * eps);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (kind == CutoffKind::quintic) return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  return 0.5 * (1.0 - std::cos(3.14159265358979323846 * u));
}

MappingTorus build_mapping_torus(const Diffeomorphism& phi,
                                 const OrientedMetric& g, double eps,
                                 int t_nodes, CutoffKind cutoff) {
  const GridManifold& m = g.metric.grid();
  if (m.dim() != 3)
    throw std::invalid_argument("mapping torus needs a 3-dimensional fiber");
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("cutoff margin eps must lie in (0, 1/2)");
  if (t_nodes < 7)
    throw std::invalid_argument("mapping torus needs at least 7 t-nodes");
  int ramp_nodes = 0;
  for (int k = 0; k < t_nodes; ++k) {
    double t = static_cast<double>(k) / (t_nodes - 1);
    if (t > eps && t < 1.0 - eps) ++ramp_nodes;
  }
  if (ramp_nodes < 5)
    throw std::invalid_argument(
        "cutoff ramp resolved by fewer than 5 t-nodes; increase the t "
        "resolution or decrease eps");

  // both endpoint connections on the stencil-derivative path
  MetricField base_metric = g.metric;
  base_metric.drop_generator();
  OrientedMetric moved = apply_diffeo(phi, g);
  moved.metric.drop_generator();
  MatrixFormField w0 = levi_civita(base_metric);
  MatrixFormField w1 = levi_civita(moved.metric);

  std::vector<int> nodes{t_nodes, 0, 0, 0};
  std::vector<double> periods{1.0, 0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    nodes[a + 1] = m.axis(a).nodes;
    periods[a + 1] = m.axis(a).period;
  }
  GridManifold grid4 =
      build_grid(4, nodes, periods, +1, Topology::torus_interval, 0);

  MappingTorus mt{grid4, phi, MatrixFormField(grid4, 1, 3), eps,
                  g.orientation};
  std::int64_t slice = m.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < grid4.node_count(); ++node) {
    std::int64_t k = node / slice, s = node % slice;
    double t = static_cast<double>(k) / (t_nodes - 1);
    double chi = cutoff_value(cutoff, eps, t);
    // the dt component (slot 0) stays zero
    for (int c = 0; c < 3; ++c) {
      const double* a = w0.block(s, c);
      const double* b = w1.block(s, c);
      double* o = mt.omega_bar.block(node, c + 1);
      for (int e = 0; e < 9; ++e) o[e] = (1.0 - chi) * a[e] + chi * b[e];
    }
  }
  return mt;
}

double pontryagin_number(const InvariantPolynomial& p, const MappingTorus& mt) {
  if (mt.glue.orientation() < 0)
    throw std::runtime_error(
        "mapping torus of an orientation-reversing map is unorientable; "
        "integrate over the double cover instead");
  if (2 * p.slots() != mt.base.dim())
    throw std::invalid_argument(
        "pontryagin_number: polynomial degree does not match the total "
        "dimension");
  FormField w = chern_weil(p, curvature(mt.omega_bar));
  return integrate_top(w, mt.orientation);
}

MappingTorus double_cover(const Diffeomorphism& phi, const OrientedMetric& g,
                          double eps, int t_nodes, CutoffKind cutoff) {
  if (phi.orientation() > 0)
    throw std::invalid_argument(
        "no double cover needed: the map already preserves orientation");
  return build_mapping_torus(compose(phi, phi), g, eps, t_nodes, cutoff);
}

}  // namespace gravcs
