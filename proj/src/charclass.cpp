#include "gravcs/charclass.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "gravcs/connection.hpp"
#include "gravcs/kernels.hpp"

namespace gravcs {

namespace {

// 8-node Gauss-Legendre rule on [0,1]
constexpr int gl_n = 8;
constexpr double gl_node[gl_n] = {
    1.9855071751231912e-02, 1.0166676129318664e-01, 2.3723379504183550e-01,
    4.0828267875217511e-01, 5.9171732124782489e-01, 7.6276620495816450e-01,
    8.9833323870681336e-01, 9.8014492824876809e-01};
constexpr double gl_weight[gl_n] = {
    5.0614268145188129e-02, 1.1119051722668724e-01, 1.5685332293894364e-01,
    1.8134189168918099e-01, 1.8134189168918099e-01, 1.5685332293894364e-01,
    1.1119051722668724e-01, 5.0614268145188129e-02};

// wedge powers F, F^2, ..., F^maxp of a matrix 2-form
std::vector<MatrixFormField> wedge_powers(const MatrixFormField& F, int maxp) {
  std::vector<MatrixFormField> W;
  W.reserve(maxp);
  W.push_back(F);
  for (int m = 2; m <= maxp; ++m) W.push_back(wedge(W.back(), F));
  return W;
}

}  // namespace

InvariantPolynomial::InvariantPolynomial(int slots, std::vector<Term> terms)
    : slots_(slots), terms_(std::move(terms)) {
  if (slots_ < 2 || slots_ % 2 != 0)
    throw std::invalid_argument(
        "invariant polynomial degree must be a positive even integer");
  for (const auto& [coeff, powers] : terms_) {
    (void)coeff;
    if (powers.empty())
      throw std::invalid_argument("invariant polynomial term has no factors");
    int total = 0;
    for (int m : powers) {
      if (m < 2 || m % 2 != 0)
        throw std::invalid_argument(
            "invariant polynomial admits only even trace powers >= 2");
      total += m;
    }
    if (total != slots_)
      throw std::invalid_argument(
          "trace powers of a term must sum to the polynomial degree");
  }
}

InvariantPolynomial InvariantPolynomial::tr_power(int m, double coeff) {
  return InvariantPolynomial(m, {{coeff, {m}}});
}

InvariantPolynomial InvariantPolynomial::tr_square(double coeff) {
  return tr_power(2, coeff);
}

InvariantPolynomial InvariantPolynomial::scaled(double c) const {
  std::vector<Term> t = terms_;
  for (auto& [coeff, powers] : t) {
    (void)powers;
    coeff *= c;
  }
  return InvariantPolynomial(slots_, std::move(t));
}

FormField chern_weil(const InvariantPolynomial& p, const MatrixFormField& F) {
  const GridManifold& grid = F.grid();
  if (F.degree() != 2)
    throw std::invalid_argument("chern_weil expects a curvature 2-form");
  int out_degree = 2 * p.slots();
  if (out_degree > grid.dim())
    throw std::invalid_argument(
        "chern_weil: form degree exceeds the grid dimension");

  int maxp = 0;
  for (const auto& [coeff, powers] : p.terms()) {
    (void)coeff;
    for (int m : powers) maxp = std::max(maxp, m);
  }
  std::vector<MatrixFormField> W = wedge_powers(F, maxp);

  FormField out(grid, out_degree);
  for (const auto& [coeff, powers] : p.terms()) {
    FormField term = trace(W[powers[0] - 1]);
    for (std::size_t j = 1; j < powers.size(); ++j)
      term = wedge(term, trace(W[powers[j] - 1]));
    axpy(out, coeff, term);
  }
  return out;
}

FormField transgression(const InvariantPolynomial& p, const MatrixFormField& A1,
                        const MatrixFormField& A0) {
  const GridManifold& grid = A1.grid();
  if (!grid.same_shape(A0.grid()) || A1.rank() != A0.rank())
    throw std::invalid_argument("transgression: connection shape mismatch");
  if (A1.degree() != 1 || A0.degree() != 1)
    throw std::invalid_argument("transgression expects connection 1-forms");
  int out_degree = 2 * p.slots() - 1;
  if (out_degree > grid.dim())
    throw std::invalid_argument(
        "transgression: form degree exceeds the grid dimension");

  MatrixFormField a = subtract(A1, A0);
  // curvature along the straight-line path: F_t = P0 + t P1 + t^2 P2
  MatrixFormField P0 = curvature(A0);
  MatrixFormField P1 = exterior_derivative(a);
  axpy(P1, 1.0, wedge(A0, a));
  axpy(P1, 1.0, wedge(a, A0));
  MatrixFormField P2 = wedge(a, a);

  int maxp = 0;
  bool need_full = false;  // whether any tr(F^m) factor appears on its own
  for (const auto& [coeff, powers] : p.terms()) {
    (void)coeff;
    for (int m : powers) maxp = std::max(maxp, m);
    if (powers.size() > 1) need_full = true;
  }

  FormField out(grid, out_degree);
  MatrixFormField Ft(grid, 2, A1.rank());
  for (int q = 0; q < gl_n; ++q) {
    double t = gl_node[q];
    lincomb(Ft, 1.0, P0, t, P1, t * t, P2);
    std::vector<MatrixFormField> W = wedge_powers(Ft, need_full ? maxp : maxp - 1);
    std::vector<FormField> trF;  // traces of the full powers, when needed
    if (need_full)
      for (int m = 1; m <= maxp; ++m) trF.push_back(trace(W[m - 1]));
    for (const auto& [coeff, powers] : p.terms())
      for (std::size_t j = 0; j < powers.size(); ++j) {
        int m = powers[j];
        // derivative of tr(A^m) in the a-direction: m tr(a F^{m-1})
        FormField factor = trace(wedge(a, W[m - 2]));
        for (std::size_t l = 0; l < powers.size(); ++l)
          if (l != j) factor = wedge(factor, trF[powers[l] - 1]);
        axpy(out, gl_weight[q] * coeff * m, factor);
      }
  }
  return out;
}

MatrixFormField flat_background(const GridManifold& grid, int rank) {
  return MatrixFormField(grid, 1, rank);
}

MatrixFormField random_connection(const GridManifold& grid, int rank,
                                  unsigned seed, double amplitude,
                                  int max_mode) {
  MatrixFormField A(grid, 1, rank);
  int n = grid.dim();
  std::int64_t nodes = grid.node_count();
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) {
        TrigPoly poly = random_trig_poly(
            grid, seed + 131u * static_cast<unsigned>((c * rank + i) * rank + j),
            amplitude, max_mode, 3);
        for (std::int64_t node = 0; node < nodes; ++node) {
          double x[4];
          grid.node_coords(node, x);
          A.at(node, c, i, j) = poly.eval(x);
        }
      }
  return A;
}

double cs_action(const InvariantPolynomial& p, const OrientedMetric& g,
                 const MatrixFormField& A0) {
  const GridManifold& grid = g.metric.grid();
  int n = grid.dim();
  if (n % 2 == 0 || 2 * p.slots() != n + 1)
    throw std::invalid_argument(
        "cs_action needs odd dimension n with polynomial degree (n+1)/2");
  if (!grid.same_shape(A0.grid()) || A0.rank() != n || A0.degree() != 1)
    throw std::invalid_argument("cs_action: background connection mismatch");
  FormField T = transgression(p, levi_civita(g.metric), A0);
  return integrate_top(T, g.orientation);
}

double delta_phi(const InvariantPolynomial& p, const Diffeomorphism& phi,
                 const OrientedMetric& g, const MatrixFormField& A0) {
  OrientedMetric moved = apply_diffeo(phi, g);
  OrientedMetric base = g;
  // keep both evaluations on one derivative path: the pulled-back metric is
  // nodal, so analytic-generator derivatives on the base side would leave a
  // systematic stencil-vs-analytic mismatch in the difference
  if (base.metric.has_generator() && !moved.metric.has_generator())
    base.metric.drop_generator();
  return cs_action(p, moved, A0) - cs_action(p, base, A0);
}

}  // namespace gravcs
