#pragma once

// Torus diffeomorphisms as chains of stages x = B y + c + f(y): an integer
// unimodular part B in GL(n,Z), a translation, and a small periodic trig
// perturbation whose certified Jacobian bound (< 1/2) guarantees global
// invertibility.  B carries the mapping-class data; B = I in every stage
// certifies an element isotopic to the identity.

#include <array>
#include <vector>

#include "gravcs/metric.hpp"
#include "gravcs/trigpoly.hpp"

namespace gravcs {

using IntMat = std::array<std::array<long long, 4>, 4>;

struct DiffeoStage {
  IntMat B{};              // integer matrix, |det| = 1
  std::array<double, 4> c{};  // translation
  std::vector<TrigPoly> f;    // per-component perturbation, or empty
};

IntMat identity_mat(int dim);

class Diffeomorphism {
 public:
  // stages applied first-to-last; every stage is validated (|det B| = 1, the
  // perturbation's row-sum Jacobian bound < 1/2)
  Diffeomorphism(int dim, const std::array<double, 4>& periods,
                 std::vector<DiffeoStage> stages);

  static Diffeomorphism identity(int dim, const std::array<double, 4>& periods);
  static Diffeomorphism affine(int dim, const std::array<double, 4>& periods,
                               const IntMat& B, const std::array<double, 4>& c);
  static Diffeomorphism perturbed(int dim, const std::array<double, 4>& periods,
                                  const IntMat& B, const std::array<double, 4>& c,
                                  std::vector<TrigPoly> f);

  int dim() const { return dim_; }
  const std::array<double, 4>& periods() const { return periods_; }
  const std::vector<DiffeoStage>& stages() const { return stages_; }

  // sign of det(product of stage B's)
  int orientation() const;
  bool is_identity() const;
  // true when every stage has B = I: the element is connected to the
  // identity through translations and perturbation scaling
  bool isotopy_trivial() const;

  void apply(const double* y, double* x) const;
  // forward Jacobian dx/dy at y, row-major dim x dim
  void jacobian(const double* y, double* J) const;
  // forward second derivatives H[(m*dim + d)*dim + e] = d2 x^m / dy^d dy^e
  void hessian(const double* y, double* H) const;

  // stagewise inverse; perturbed stages use the fixed-point iteration
  // y -> B^-1 (x - c - f(y)) to 1e-13, cap 50 (defensive: the Jacobian
  // invariant makes divergence impossible)
  void apply_inverse(const double* x, double* y) const;
  // Jacobian of the inverse at x, i.e. [jacobian(apply_inverse(x))]^-1
  void inverse_jacobian(const double* x, double* Jinv) const;

 private:
  int dim_ = 0;
  std::array<double, 4> periods_{1, 1, 1, 1};
  std::vector<DiffeoStage> stages_;
};

// outer o inner (inner acts first); stage lists concatenate
Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner);

// smooth periodic vector field with analytic components
class VectorFieldOnM {
 public:
  VectorFieldOnM(const GridManifold& grid, std::vector<TrigPoly> comps);

  const GridManifold& grid() const { return grid_; }
  const TrigPoly& comp(int i) const { return comps_[i]; }
  void eval(const double* x, double* v) const;
  // dv[i*dim + j] = d X^i / d x^j
  void eval_jacobian(const double* x, double* dv) const;
  FormField nodal_component(int i) const;

 private:
  GridManifold grid_;
  std::vector<TrigPoly> comps_;
};

VectorFieldOnM random_vector_field(const GridManifold& g, unsigned seed,
                                   double amplitude, int max_mode);

// time-t flow of X: per-node trajectories integrated with classical RK4,
// re-fit as a B = I stage (an explicit element of the identity component)
Diffeomorphism isotopy_flow(const VectorFieldOnM& X, double t, int n_steps = 32);

// ((phi^-1)*g, orientation * sign det B); metric values pulled back through
// the generator when present, else through trig interpolation of the nodal
// data.  Identity returns its input bit-for-bit.
OrientedMetric apply_diffeo(const Diffeomorphism& phi, const OrientedMetric& g);

// coordinate transformation law for a connection 1-form (inhomogeneous term
// included): the image of `conn` under phi, sampled on the same grid
MatrixFormField transform_connection(const Diffeomorphism& phi,
                                     const MatrixFormField& conn);

// derivative at t = 0 of the left action apply_diffeo(flow(X, t), g), i.e.
// minus the textbook Lie derivative:
// -(X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k), as a degree-0 symmetric
// matrix form; metric derivatives analytic when generated
MatrixFormField lie_derivative_metric(const VectorFieldOnM& X,
                                      const MetricField& g);

}  // namespace gravcs
