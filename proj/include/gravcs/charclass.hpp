#pragma once

#include <utility>
#include <vector>

#include "gravcs/diffeo.hpp"
#include "gravcs/form.hpp"
#include "gravcs/metric.hpp"

namespace gravcs {

// Invariant polynomial of the curvature in the trace-power basis: a sum of
// terms coeff * tr(A^{m1}) * tr(A^{m2}) * ... with every power even and
// m1 + m2 + ... = slots (the homogeneous degree in the curvature argument).
class InvariantPolynomial {
 public:
  using Term = std::pair<double, std::vector<int>>;

  InvariantPolynomial(int slots, std::vector<Term> terms);

  // single even trace power tr(A^m)
  static InvariantPolynomial tr_power(int m, double coeff = 1.0);
  // tr(A^2): the degree-2 generator used for (3+1)-dimensional work
  static InvariantPolynomial tr_square(double coeff = 1.0);

  int slots() const { return slots_; }
  const std::vector<Term>& terms() const { return terms_; }
  InvariantPolynomial scaled(double c) const;

 private:
  int slots_;
  std::vector<Term> terms_;
};

// nodal evaluation of p on copies of the curvature F; degree 2*slots form
FormField chern_weil(const InvariantPolynomial& p, const MatrixFormField& F);

// Chern-Simons transgression form between two connections on the same
// bundle, via the straight-line path A_t = A0 + t(A1-A0) and 8-node
// Gauss-Legendre in t (exact for the polynomial integrand); degree 2*slots-1;
// satisfies d T = p(F1) - p(F0) up to stencil truncation and T(A,A) = 0
// identically
FormField transgression(const InvariantPolynomial& p, const MatrixFormField& A1,
                        const MatrixFormField& A0);

// zero connection usable as a fixed background
MatrixFormField flat_background(const GridManifold& grid, int rank);

// random trigonometric matrix-valued 1-form (reproducible background draws)
MatrixFormField random_connection(const GridManifold& grid, int rank,
                                  unsigned seed, double amplitude,
                                  int max_mode);

// orientation-signed integral of the transgression from the Levi-Civita
// connection of g to the background A0
double cs_action(const InvariantPolynomial& p, const OrientedMetric& g,
                 const MatrixFormField& A0);

// change of the action under the diffeomorphism, at a shared background
double delta_phi(const InvariantPolynomial& p, const Diffeomorphism& phi,
                 const OrientedMetric& g, const MatrixFormField& A0);

}  // namespace gravcs
