#include "gravcs/diffeo.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gravcs/kernels.hpp"
#include "gravcs/smallmat.hpp"

namespace gravcs {

namespace {

constexpr double kInverseTol = 1e-13;
constexpr int kInverseCap = 50;

bool is_identity_mat(const IntMat& B, int dim) {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (B[i][j] != (i == j ? 1 : 0)) return false;
  return true;
}

long long int_det(const IntMat& B, int dim) {
  long long a[16];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a[i * dim + j] = B[i][j];
  return det_small_int(a, dim);
}

// exact integer inverse via the adjugate; valid because |det| = 1
IntMat int_inverse(const IntMat& B, int dim) {
  long long det = int_det(B, dim);
  IntMat inv{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      long long minor[9];
      int t = 0;
      for (int r = 0; r < dim; ++r) {
        if (r == i) continue;
        for (int c = 0; c < dim; ++c) {
          if (c == j) continue;
          minor[t++] = B[r][c];
        }
      }
      long long cof = det_small_int(minor, dim - 1);
      if ((i + j) % 2) cof = -cof;
      inv[j][i] = cof * det;  // det = +/-1, so this is division by det
    }
  if (dim == 1) inv[0][0] = det;
  return inv;
}

double perturbation_jacobian_bound(const std::vector<TrigPoly>& f, int dim) {
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    double row = 0.0;
    for (int j = 0; j < dim; ++j) row += f[i].gradient_bound(j);
    worst = std::max(worst, row);
  }
  return worst;
}

void stage_apply(const DiffeoStage& s, int dim, const double* y, double* x) {
  for (int i = 0; i < dim; ++i) {
    double v = s.c[i];
    for (int j = 0; j < dim; ++j) v += s.B[i][j] * y[j];
    if (!s.f.empty()) v += s.f[i].eval(y);
    x[i] = v;
  }
}

void stage_jacobian(const DiffeoStage& s, int dim, const double* y, double* J) {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double v = static_cast<double>(s.B[i][j]);
      if (!s.f.empty()) v += s.f[i].deriv(y, j);
      J[i * dim + j] = v;
    }
}

void stage_hessian(const DiffeoStage& s, int dim, const double* y, double* H) {
  for (int m = 0; m < dim; ++m)
    for (int d = 0; d < dim; ++d)
      for (int e = 0; e < dim; ++e)
        H[(m * dim + d) * dim + e] =
            s.f.empty() ? 0.0 : s.f[m].deriv2(y, d, e);
}

void stage_inverse(const DiffeoStage& s, const IntMat& Binv, int dim,
                   const double* x, double* y) {
  auto solve_affine = [&](const double* rhs, double* out) {
    for (int i = 0; i < dim; ++i) {
      double v = 0.0;
      for (int j = 0; j < dim; ++j) v += Binv[i][j] * (rhs[j] - s.c[j]);
      out[i] = v;
    }
  };
  solve_affine(x, y);
  if (s.f.empty()) return;
  double rhs[4], ynew[4];
  for (int it = 0; it < kInverseCap; ++it) {
    for (int j = 0; j < dim; ++j) rhs[j] = x[j] - s.f[j].eval(y);
    solve_affine(rhs, ynew);
    double delta = 0.0;
    for (int j = 0; j < dim; ++j) delta = std::max(delta, std::fabs(ynew[j] - y[j]));
    for (int j = 0; j < dim; ++j) y[j] = ynew[j];
    if (delta < kInverseTol) return;
  }
  throw std::runtime_error("diffeomorphism inverse iteration did not converge");
}

}  // namespace

IntMat identity_mat(int dim) {
  IntMat B{};
  for (int i = 0; i < dim; ++i) B[i][i] = 1;
  return B;
}

Diffeomorphism::Diffeomorphism(int dim, const std::array<double, 4>& periods,
                               std::vector<DiffeoStage> stages)
    : dim_(dim), periods_(periods), stages_(std::move(stages)) {
  if (dim < 1 || dim > max_dim)
    throw std::invalid_argument("diffeomorphism dimension must be in 1..4");
  for (const DiffeoStage& s : stages_) {
    long long det = int_det(s.B, dim);
    if (det != 1 && det != -1)
      throw std::invalid_argument("stage matrix must have determinant +/-1");
    if (!s.f.empty()) {
      if (static_cast<int>(s.f.size()) != dim)
        throw std::invalid_argument("perturbation needs one component per axis");
      double bound = perturbation_jacobian_bound(s.f, dim);
      if (bound >= 0.5) {
        std::ostringstream os;
        os << "perturbation Jacobian bound " << bound
           << " >= 1/2; invertibility certificate fails";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

Diffeomorphism Diffeomorphism::identity(int dim,
                                        const std::array<double, 4>& periods) {
  return Diffeomorphism(dim, periods, {});
}

Diffeomorphism Diffeomorphism::affine(int dim,
                                      const std::array<double, 4>& periods,
                                      const IntMat& B,
                                      const std::array<double, 4>& c) {
  return Diffeomorphism(dim, periods, {DiffeoStage{B, c, {}}});
}

Diffeomorphism Diffeomorphism::perturbed(int dim,
                                         const std::array<double, 4>& periods,
                                         const IntMat& B,
                                         const std::array<double, 4>& c,
                                         std::vector<TrigPoly> f) {
  return Diffeomorphism(dim, periods, {DiffeoStage{B, c, std::move(f)}});
}

int Diffeomorphism::orientation() const {
  long long p = 1;
  for (const DiffeoStage& s : stages_) p *= int_det(s.B, dim_);
  return p > 0 ? +1 : -1;
}

bool Diffeomorphism::is_identity() const {
  for (const DiffeoStage& s : stages_) {
    if (!is_identity_mat(s.B, dim_)) return false;
    for (int i = 0; i < dim_; ++i)
      if (s.c[i] != 0.0) return false;
    for (const TrigPoly& p : s.f)
      if (!p.terms().empty()) return false;
  }
  return true;
}

bool Diffeomorphism::isotopy_trivial() const {
  for (const DiffeoStage& s : stages_)
    if (!is_identity_mat(s.B, dim_)) return false;
  return true;
}

void Diffeomorphism::apply(const double* y, double* x) const {
  double cur[4], next[4];
  for (int i = 0; i < dim_; ++i) cur[i] = y[i];
  for (const DiffeoStage& s : stages_) {
    stage_apply(s, dim_, cur, next);
    for (int i = 0; i < dim_; ++i) cur[i] = next[i];
  }
  for (int i = 0; i < dim_; ++i) x[i] = cur[i];
}

void Diffeomorphism::jacobian(const double* y, double* J) const {
  int n = dim_;
  double acc[16], cur[4], next[4], Js[16], tmp[16];
  for (int i = 0; i < n * n; ++i) acc[i] = (i % (n + 1) == 0) ? 1.0 : 0.0;
  for (int i = 0; i < n; ++i) cur[i] = y[i];
  for (const DiffeoStage& s : stages_) {
    stage_jacobian(s, n, cur, Js);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += Js[i * n + k] * acc[k * n + j];
        tmp[i * n + j] = v;
      }
    for (int i = 0; i < n * n; ++i) acc[i] = tmp[i];
    stage_apply(s, n, cur, next);
    for (int i = 0; i < n; ++i) cur[i] = next[i];
  }
  for (int i = 0; i < n * n; ++i) J[i] = acc[i];
}

void Diffeomorphism::hessian(const double* y, double* H) const {
  int n = dim_;
  // accumulated chain: J (prefix Jacobian) and H (prefix Hessian)
  double J[16], Hacc[64], cur[4], next[4];
  for (int i = 0; i < n * n; ++i) J[i] = (i % (n + 1) == 0) ? 1.0 : 0.0;
  for (int i = 0; i < n * n * n; ++i) Hacc[i] = 0.0;
  for (int i = 0; i < n; ++i) cur[i] = y[i];
  double Js[16], Hs[64], Jnew[16], Hnew[64];
  for (const DiffeoStage& s : stages_) {
    stage_jacobian(s, n, cur, Js);
    stage_hessian(s, n, cur, Hs);
    // H_new^m_de = Hs^m_ab J^a_d J^b_e + Js^m_a Hacc^a_de
    for (int m = 0; m < n; ++m)
      for (int d = 0; d < n; ++d)
        for (int e = 0; e < n; ++e) {
          double v = 0.0;
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b)
              v += Hs[(m * n + a) * n + b] * J[a * n + d] * J[b * n + e];
            v += Js[m * n + a] * Hacc[(a * n + d) * n + e];
          }
          Hnew[(m * n + d) * n + e] = v;
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += Js[i * n + k] * J[k * n + j];
        Jnew[i * n + j] = v;
      }
    for (int i = 0; i < n * n; ++i) J[i] = Jnew[i];
    for (int i = 0; i < n * n * n; ++i) Hacc[i] = Hnew[i];
    stage_apply(s, n, cur, next);
    for (int i = 0; i < n; ++i) cur[i] = next[i];
  }
  for (int i = 0; i < n * n * n; ++i) H[i] = Hacc[i];
}

void Diffeomorphism::apply_inverse(const double* x, double* y) const {
  double cur[4], next[4];
  for (int i = 0; i < dim_; ++i) cur[i] = x[i];
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    IntMat Binv = int_inverse(it->B, dim_);
    stage_inverse(*it, Binv, dim_, cur, next);
    for (int i = 0; i < dim_; ++i) cur[i] = next[i];
  }
  for (int i = 0; i < dim_; ++i) y[i] = cur[i];
}

void Diffeomorphism::inverse_jacobian(const double* x, double* Jinv) const {
  double y[4], J[16];
  apply_inverse(x, y);
  jacobian(y, J);
  invert_small(J, dim_, Jinv);
}

Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner) {
  if (outer.dim() != inner.dim())
    throw std::invalid_argument("compose: dimension mismatch");
  std::vector<DiffeoStage> chain = inner.stages();
  for (const DiffeoStage& s : outer.stages()) chain.push_back(s);
  return Diffeomorphism(inner.dim(), inner.periods(), std::move(chain));
}

VectorFieldOnM::VectorFieldOnM(const GridManifold& grid,
                               std::vector<TrigPoly> comps)
    : grid_(grid), comps_(std::move(comps)) {
  if (static_cast<int>(comps_.size()) != grid.dim())
    throw std::invalid_argument("vector field needs one component per axis");
}

void VectorFieldOnM::eval(const double* x, double* v) const {
  for (int i = 0; i < grid_.dim(); ++i) v[i] = comps_[i].eval(x);
}

void VectorFieldOnM::eval_jacobian(const double* x, double* dv) const {
  int n = grid_.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dv[i * n + j] = comps_[i].deriv(x, j);
}

FormField VectorFieldOnM::nodal_component(int i) const {
  FormField out(grid_, 0);
  std::int64_t nn = grid_.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4];
    grid_.node_coords(node, x);
    out.at(node, 0) = comps_[i].eval(x);
  }
  return out;
}

VectorFieldOnM random_vector_field(const GridManifold& g, unsigned seed,
                                   double amplitude, int max_mode) {
  std::vector<TrigPoly> comps;
  for (int i = 0; i < g.dim(); ++i)
    comps.push_back(
        random_trig_poly(g, seed + 977u * i, amplitude, max_mode, 3));
  return VectorFieldOnM(g, std::move(comps));
}

Diffeomorphism isotopy_flow(const VectorFieldOnM& X, double t, int n_steps) {
  const GridManifold& g = X.grid();
  if (!g.all_periodic())
    throw std::invalid_argument("isotopy flow needs a fully periodic grid");
  int n = g.dim();
  std::int64_t nn = g.node_count();
  std::vector<std::vector<double>> disp(n, std::vector<double>(nn));
  double dt = t / n_steps;
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4], k1[4], k2[4], k3[4], k4[4], p[4];
    g.node_coords(node, x);
    double x0[4];
    for (int i = 0; i < n; ++i) x0[i] = x[i];
    for (int s = 0; s < n_steps; ++s) {
      X.eval(x, k1);
      for (int i = 0; i < n; ++i) p[i] = x[i] + 0.5 * dt * k1[i];
      X.eval(p, k2);
      for (int i = 0; i < n; ++i) p[i] = x[i] + 0.5 * dt * k2[i];
      X.eval(p, k3);
      for (int i = 0; i < n; ++i) p[i] = x[i] + dt * k3[i];
      X.eval(p, k4);
      for (int i = 0; i < n; ++i)
        x[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    for (int i = 0; i < n; ++i) disp[i][node] = x[i] - x0[i];
  }

  std::vector<TrigPoly> f;
  for (int i = 0; i < n; ++i) f.push_back(TrigPoly::fit(g, disp[i]));
  double bound = perturbation_jacobian_bound(f, n);
  if (bound >= 0.5) {
    std::ostringstream os;
    os << "flow displacement breaks the Jacobian bound (" << bound
       << " >= 1/2); use a smaller vector field or shorter time";
    throw std::runtime_error(os.str());
  }
  std::array<double, 4> periods{1, 1, 1, 1};
  for (int a = 0; a < n; ++a) periods[a] = g.axis(a).period;
  return Diffeomorphism::perturbed(n, periods, identity_mat(n), {}, std::move(f));
}

OrientedMetric apply_diffeo(const Diffeomorphism& phi, const OrientedMetric& om) {
  const MetricField& gm = om.metric;
  const GridManifold& grid = gm.grid();
  int n = grid.dim();
  if (phi.dim() != n)
    throw std::invalid_argument("apply_diffeo: dimension mismatch");
  if (phi.is_identity()) return om;
  if (!grid.all_periodic())
    throw std::invalid_argument("pullback needs a fully periodic grid");

  // interpolants used when no closed-form generator is available
  std::vector<TrigPoly> interp;
  if (!gm.has_generator()) {
    std::vector<double> nodal(grid.node_count());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        for (std::int64_t node = 0; node < grid.node_count(); ++node)
          nodal[node] = gm.at(node, i, j);
        interp.push_back(TrigPoly::fit(grid, nodal));
      }
  }

  MetricField res(grid);
  res.drop_generator();
  std::int64_t nn = grid.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4], y[4], Jf[16], A[16], gv[16];
    grid.node_coords(node, x);
    phi.apply_inverse(x, y);
    phi.jacobian(y, Jf);
    invert_small(Jf, n, A);  // A^a_i = d y^a / d x^i
    if (gm.has_generator()) {
      gm.generator().eval(y, gv);
    } else {
      int t = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double v = interp[t++].eval(y);
          gv[i * n + j] = v;
          gv[j * n + i] = v;
        }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            v += A[a * n + i] * A[b * n + j] * gv[a * n + b];
        res.at(node, i, j) = v;
      }
  }
  return OrientedMetric{res, om.orientation * phi.orientation()};
}

MatrixFormField transform_connection(const Diffeomorphism& phi,
                                     const MatrixFormField& conn) {
  const GridManifold& grid = conn.grid();
  int n = grid.dim();
  if (conn.degree() != 1 || conn.rank() != n)
    throw std::invalid_argument("transform_connection expects a connection 1-form");
  if (!grid.all_periodic())
    throw std::invalid_argument("transform_connection needs a periodic grid");

  // trig interpolants of every Christoffel entry for off-node evaluation
  std::vector<TrigPoly> interp(n * n * n);
  {
    std::vector<double> nodal(grid.node_count());
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          for (std::int64_t node = 0; node < grid.node_count(); ++node)
            nodal[node] = conn.at(node, i, a, b);
          interp[(i * n + a) * n + b] = TrigPoly::fit(grid, nodal);
        }
  }

  MatrixFormField out(grid, 1, n);
  std::int64_t nn = grid.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4], y[4], F[16], A[16], H[64], G[64], d2y[64];
    grid.node_coords(node, x);
    phi.apply_inverse(x, y);
    phi.jacobian(y, F);      // F^a_c = d x^a / d y^c
    invert_small(F, n, A);   // A^c_i = d y^c / d x^i
    phi.hessian(y, H);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          G[(i * n + a) * n + b] = interp[(i * n + a) * n + b].eval(y);

    // d2 y^c / dx^i dx^b = - A^c_m H^m_de A^d_i A^e_b
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < n; ++i)
        for (int b = 0; b < n; ++b) {
          double v = 0.0;
          for (int m = 0; m < n; ++m)
            for (int d = 0; d < n; ++d)
              for (int e = 0; e < n; ++e)
                v += A[c * n + m] * H[(m * n + d) * n + e] * A[d * n + i] *
                     A[e * n + b];
          d2y[(c * n + i) * n + b] = -v;
        }

    // Gamma'^a_ib = F^a_c Gamma^c_de(y) A^d_i A^e_b + F^a_c d2y^c_ib
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double v = 0.0;
          for (int c = 0; c < n; ++c) {
            double inner = d2y[(c * n + i) * n + b];
            for (int d = 0; d < n; ++d)
              for (int e = 0; e < n; ++e)
                inner += G[(d * n + c) * n + e] * A[d * n + i] * A[e * n + b];
            v += F[a * n + c] * inner;
          }
          out.at(node, i, a, b) = v;
        }
  }
  return out;
}

MatrixFormField lie_derivative_metric(const VectorFieldOnM& X,
                                      const MetricField& g) {
  const GridManifold& grid = g.grid();
  int n = grid.dim();
  if (!X.grid().same_shape(grid))
    throw std::invalid_argument("lie derivative: grid mismatch");

  // metric first derivatives: analytic via the generator, stencils otherwise
  std::vector<MatrixFormField> dg;
  if (!g.has_generator())
    for (int a = 0; a < n; ++a) dg.push_back(partial_derivative(g.tensor(), a));

  MatrixFormField out(grid, 0, n);
  std::int64_t nn = grid.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4], Xv[4], dX[16], dgk[4][16];
    grid.node_coords(node, x);
    X.eval(x, Xv);
    X.eval_jacobian(x, dX);
    for (int k = 0; k < n; ++k) {
      if (g.has_generator())
        g.generator().eval_deriv(x, k, dgk[k]);
      else
        for (int e = 0; e < n * n; ++e) dgk[k][e] = dg[k].block(node, 0)[e];
    }
    // derivative of the left action (phi_t^-1)^* g at t = 0, i.e. minus the
    // textbook Lie derivative along X
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k)
          v += Xv[k] * dgk[k][i * n + j] + g.at(node, k, j) * dX[k * n + i] +
               g.at(node, i, k) * dX[k * n + j];
        out.at(node, 0, i, j) = -v;
      }
  }
  return out;
}

}  // namespace gravcs
