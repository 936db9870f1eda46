#pragma once

// Real trigonometric polynomials on the torus: finite sums
//   sum_k  a_k cos(2 pi k.x/L) + b_k sin(2 pi k.x/L),   k integer vector.
// They serve as closed-form ingredients everywhere a grid function is not
// enough: metric generators, diffeomorphism perturbations, vector fields,
// and exact band-limited interpolation of nodal data.

#include <array>
#include <vector>

#include "gravcs/grid.hpp"

namespace gravcs {

struct TrigTerm {
  std::array<int, 4> k{};  // integer frequency per axis
  double amp_cos = 0.0;
  double amp_sin = 0.0;
};

class TrigPoly {
 public:
  TrigPoly() = default;
  TrigPoly(int dim, const std::array<double, 4>& periods);

  int dim() const { return dim_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  void add_term(const std::array<int, 4>& k, double amp_cos, double amp_sin);

  double eval(const double* x) const;
  double deriv(const double* x, int axis) const;
  double deriv2(const double* x, int a, int b) const;

  // certified sup bound on |d/dx_axis| (sum of per-term amplitudes)
  double gradient_bound(int axis) const;

  // drop terms with amplitude below eps * (largest amplitude)
  void prune(double rel_eps = 1e-12);

  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly scaled(double s) const;

  // exact trigonometric interpolation of nodal data on a fully periodic grid
  // (separable DFT; conjugate frequency pairs merged into cos/sin terms)
  static TrigPoly fit(const GridManifold& g, const std::vector<double>& nodal,
                      double prune_rel_eps = 1e-12);

 private:
  int dim_ = 0;
  std::array<double, 4> periods_{1, 1, 1, 1};
  std::vector<TrigTerm> terms_;
};

}  // namespace gravcs
