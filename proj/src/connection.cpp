#include "gravcs/connection.hpp"

#include <stdexcept>
#include <vector>

#include "gravcs/kernels.hpp"
#include "gravcs/smallmat.hpp"

namespace gravcs {

MatrixFormField levi_civita(const MetricField& g) {
  const GridManifold& grid = g.grid();
  int n = grid.dim();
  g.check_positive_definite();

  std::vector<MatrixFormField> dg;
  if (!g.has_generator())
    for (int a = 0; a < n; ++a) dg.push_back(partial_derivative(g.tensor(), a));

  MatrixFormField w(grid, 1, n);
  std::int64_t nn = grid.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double ginv[16], dgk[4][16];
    invert_small(g.tensor().block(node, 0), n, ginv);
    if (g.has_generator()) {
      double x[4];
      grid.node_coords(node, x);
      for (int a = 0; a < n; ++a) g.generator().eval_deriv(x, a, dgk[a]);
    } else {
      for (int a = 0; a < n; ++a)
        for (int e = 0; e < n * n; ++e) dgk[a][e] = dg[a].block(node, 0)[e];
    }
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int l = 0; l < n; ++l)
            v += ginv[k * n + l] * (dgk[i][j * n + l] + dgk[j][i * n + l] -
                                    dgk[l][i * n + j]);
          w.at(node, i, k, j) = 0.5 * v;
        }
  }
  return w;
}

MatrixFormField curvature(const MatrixFormField& A) {
  if (A.degree() != 1)
    throw std::invalid_argument("curvature expects a connection 1-form");
  MatrixFormField F = exterior_derivative(A);
  axpy(F, 1.0, wedge(A, A));
  return F;
}

}  // namespace gravcs
