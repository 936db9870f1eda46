#include "gravcs/kernels.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gravcs {

FormField::FormField(const GridManifold& grid, int degree)
    : grid_(grid), degree_(degree) {
  if (degree < 0 || degree > grid.dim())
    throw std::invalid_argument("form degree out of range 0..dim");
  ncomp_ = binomial(grid.dim(), degree);
  v_.assign(static_cast<size_t>(grid.node_count()) * ncomp_, 0.0);
}

MatrixFormField::MatrixFormField(const GridManifold& grid, int degree, int rank)
    : grid_(grid), degree_(degree), rank_(rank) {
  if (degree < 0 || degree > grid.dim())
    throw std::invalid_argument("form degree out of range 0..dim");
  if (rank < 1 || rank > max_dim)
    throw std::invalid_argument("matrix rank out of range 1..4");
  ncomp_ = binomial(grid.dim(), degree);
  v_.assign(static_cast<size_t>(grid.node_count()) * ncomp_ * rank * rank, 0.0);
}

double pairwise_sum(const double* v, std::int64_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::int64_t m = n / 2;
  return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

double rms(const double* v, std::int64_t n) {
  std::vector<double> sq(n);
  for (std::int64_t i = 0; i < n; ++i) sq[i] = v[i] * v[i];
  return std::sqrt(pairwise_sum(sq.data(), n) / static_cast<double>(n));
}

double max_abs(const double* v, std::int64_t n) {
  double m = 0.0;
  for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

namespace {

// per-position stencil: 5 node offsets (already times the axis stride) and
// coefficients; periodic axes share one interior pattern modulo wraparound
struct StencilPlan {
  std::vector<std::array<std::int64_t, 5>> off;  // per position along axis
  std::vector<std::array<double, 5>> co;
};

StencilPlan build_stencil(const GridManifold& g, int axis) {
  const Axis& ax = g.axis(axis);
  int n = ax.nodes;
  std::int64_t stride = g.stride(axis);
  double h = g.spacing(axis);
  StencilPlan p;
  p.off.resize(n);
  p.co.resize(n);
  if (ax.periodic) {
    for (int i = 0; i < n; ++i) {
      int im2 = (i - 2 + 2 * n) % n, im1 = (i - 1 + n) % n;
      int ip1 = (i + 1) % n, ip2 = (i + 2) % n;
      p.off[i] = {(im2 - i) * stride, (im1 - i) * stride, 0,
                  (ip1 - i) * stride, (ip2 - i) * stride};
      p.co[i] = {1.0 / (12 * h), -8.0 / (12 * h), 0.0, 8.0 / (12 * h),
                 -1.0 / (12 * h)};
    }
  } else {
    for (int i = 0; i < n; ++i) {
      if (i >= 2 && i <= n - 3) {
        p.off[i] = {-2 * stride, -1 * stride, 0, 1 * stride, 2 * stride};
        p.co[i] = {1.0 / (12 * h), -8.0 / (12 * h), 0.0, 8.0 / (12 * h),
                   -1.0 / (12 * h)};
      } else if (i == 0) {
        p.off[i] = {0, stride, 2 * stride, 3 * stride, 4 * stride};
        p.co[i] = {-25.0 / (12 * h), 48.0 / (12 * h), -36.0 / (12 * h),
                   16.0 / (12 * h), -3.0 / (12 * h)};
      } else if (i == 1) {
        p.off[i] = {-stride, 0, stride, 2 * stride, 3 * stride};
        p.co[i] = {-3.0 / (12 * h), -10.0 / (12 * h), 18.0 / (12 * h),
                   -6.0 / (12 * h), 1.0 / (12 * h)};
      } else if (i == n - 2) {
        p.off[i] = {stride, 0, -stride, -2 * stride, -3 * stride};
        p.co[i] = {3.0 / (12 * h), 10.0 / (12 * h), -18.0 / (12 * h),
                   6.0 / (12 * h), -1.0 / (12 * h)};
      } else {  // i == n-1
        p.off[i] = {0, -stride, -2 * stride, -3 * stride, -4 * stride};
        p.co[i] = {25.0 / (12 * h), -48.0 / (12 * h), 36.0 / (12 * h),
                   -16.0 / (12 * h), 3.0 / (12 * h)};
      }
    }
  }
  return p;
}

// derivative of every scalar slot (slots = components x matrix entries)
void apply_derivative(const GridManifold& g, int axis, const double* in,
                      double* out, std::int64_t slots) {
  StencilPlan plan = build_stencil(g, axis);
  std::int64_t nn = g.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    int pos = g.axis_index(node, axis);
    const auto& off = plan.off[pos];
    const auto& co = plan.co[pos];
    double* o = out + node * slots;
    const double* base = in + node * slots;
    for (std::int64_t s = 0; s < slots; ++s) {
      double acc = co[0] * base[off[0] * slots + s];
      acc += co[1] * base[off[1] * slots + s];
      acc += co[2] * base[off[2] * slots + s];
      acc += co[3] * base[off[3] * slots + s];
      acc += co[4] * base[off[4] * slots + s];
      o[s] = acc;
    }
  }
}

void check_axis(const GridManifold& g, int axis) {
  if (axis < 0 || axis >= g.dim())
    throw std::invalid_argument("axis out of range");
}

// accumulate: out[node][tab(axis,c).pos][slot] += sign * d[node][c][slot]
void accumulate_d(const GridManifold& g, int q, int ncomp_in, int ncomp_out,
                  std::int64_t block, const double* d, double* out, int axis) {
  const auto& tab = deriv_table(g.dim(), q);
  std::int64_t nn = g.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    const double* src = d + node * ncomp_in * block;
    double* dst = out + node * ncomp_out * block;
    for (int c = 0; c < ncomp_in; ++c) {
      const MergeEntry& e = tab[axis * ncomp_in + c];
      if (e.sign == 0) continue;
      double s = static_cast<double>(e.sign);
      double* o = dst + e.pos * block;
      const double* i = src + c * block;
      for (std::int64_t k = 0; k < block; ++k) o[k] += s * i[k];
    }
  }
}

}  // namespace

FormField partial_derivative(const FormField& f, int axis) {
  check_axis(f.grid(), axis);
  FormField out(f.grid(), f.degree());
  apply_derivative(f.grid(), axis, f.data(), out.data(), f.comp_count());
  return out;
}

MatrixFormField partial_derivative(const MatrixFormField& f, int axis) {
  check_axis(f.grid(), axis);
  MatrixFormField out(f.grid(), f.degree(), f.rank());
  apply_derivative(f.grid(), axis, f.data(), out.data(),
                   static_cast<std::int64_t>(f.comp_count()) * f.rank() * f.rank());
  return out;
}

FormField exterior_derivative(const FormField& f) {
  const GridManifold& g = f.grid();
  if (f.degree() >= g.dim())
    throw std::invalid_argument("exterior derivative of a top-degree form");
  FormField out(g, f.degree() + 1);
  FormField tmp(g, f.degree());
  for (int axis = 0; axis < g.dim(); ++axis) {
    apply_derivative(g, axis, f.data(), tmp.data(), f.comp_count());
    accumulate_d(g, f.degree(), f.comp_count(), out.comp_count(), 1, tmp.data(),
                 out.data(), axis);
  }
  return out;
}

MatrixFormField exterior_derivative(const MatrixFormField& f) {
  const GridManifold& g = f.grid();
  if (f.degree() >= g.dim())
    throw std::invalid_argument("exterior derivative of a top-degree form");
  std::int64_t block = static_cast<std::int64_t>(f.rank()) * f.rank();
  MatrixFormField out(g, f.degree() + 1, f.rank());
  MatrixFormField tmp(g, f.degree(), f.rank());
  for (int axis = 0; axis < g.dim(); ++axis) {
    apply_derivative(g, axis, f.data(), tmp.data(), f.comp_count() * block);
    accumulate_d(g, f.degree(), f.comp_count(), out.comp_count(), block,
                 tmp.data(), out.data(), axis);
  }
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  const GridManifold& g = a.grid();
  if (!g.same_shape(b.grid()))
    throw std::invalid_argument("wedge: grids differ");
  if (a.degree() + b.degree() > g.dim())
    throw std::invalid_argument("wedge: degree overflow");
  FormField out(g, a.degree() + b.degree());
  const auto& tab = wedge_table(g.dim(), a.degree(), b.degree());
  int ca = a.comp_count(), cb = b.comp_count(), co = out.comp_count();
  std::int64_t nn = g.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    const double* pa = a.data() + node * ca;
    const double* pb = b.data() + node * cb;
    double* po = out.data() + node * co;
    for (int i = 0; i < ca; ++i)
      for (int j = 0; j < cb; ++j) {
        const MergeEntry& e = tab[i * cb + j];
        if (e.sign == 0) continue;
        po[e.pos] += e.sign * pa[i] * pb[j];
      }
  }
  return out;
}

MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b) {
  const GridManifold& g = a.grid();
  if (!g.same_shape(b.grid()))
    throw std::invalid_argument("wedge: grids differ");
  if (a.rank() != b.rank())
    throw std::invalid_argument("wedge: matrix ranks differ");
  if (a.degree() + b.degree() > g.dim())
    throw std::invalid_argument("wedge: degree overflow");
  int r = a.rank();
  MatrixFormField out(g, a.degree() + b.degree(), r);
  const auto& tab = wedge_table(g.dim(), a.degree(), b.degree());
  int ca = a.comp_count(), cb = b.comp_count(), co = out.comp_count();
  std::int64_t nn = g.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    for (int i = 0; i < ca; ++i) {
      const double* A = a.block(node, i);
      for (int j = 0; j < cb; ++j) {
        const MergeEntry& e = tab[i * cb + j];
        if (e.sign == 0) continue;
        const double* B = b.block(node, j);
        double* O = out.block(node, e.pos);
        double s = static_cast<double>(e.sign);
        for (int p = 0; p < r; ++p)
          for (int q = 0; q < r; ++q) {
            double acc = 0.0;
            for (int m = 0; m < r; ++m) acc += A[p * r + m] * B[m * r + q];
            O[p * r + q] += s * acc;
          }
      }
    }
  }
  return out;
}

FormField trace(const MatrixFormField& a) {
  FormField out(a.grid(), a.degree());
  int c = a.comp_count(), r = a.rank();
  std::int64_t nn = a.grid().node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node)
    for (int i = 0; i < c; ++i) {
      const double* A = a.block(node, i);
      double t = 0.0;
      for (int p = 0; p < r; ++p) t += A[p * r + p];
      out.at(node, i) = t;
    }
  return out;
}

void lincomb(MatrixFormField& out, double c0, const MatrixFormField& f0,
             double c1, const MatrixFormField& f1) {
  std::int64_t n = out.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.data()[i] = c0 * f0.data()[i] + c1 * f1.data()[i];
}

void lincomb(MatrixFormField& out, double c0, const MatrixFormField& f0,
             double c1, const MatrixFormField& f1, double c2,
             const MatrixFormField& f2) {
  std::int64_t n = out.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.data()[i] = c0 * f0.data()[i] + c1 * f1.data()[i] + c2 * f2.data()[i];
}

void axpy(FormField& y, double a, const FormField& x) {
  std::int64_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y.data()[i] += a * x.data()[i];
}

void axpy(MatrixFormField& y, double a, const MatrixFormField& x) {
  std::int64_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y.data()[i] += a * x.data()[i];
}

void scale(FormField& y, double a) {
  std::int64_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y.data()[i] *= a;
}

MatrixFormField subtract(const MatrixFormField& a, const MatrixFormField& b) {
  MatrixFormField out(a.grid(), a.degree(), a.rank());
  lincomb(out, 1.0, a, -1.0, b);
  return out;
}

double integrate_top(const FormField& f) {
  return integrate_top(f, f.grid().orientation());
}

double integrate_top(const FormField& f, int orientation) {
  const GridManifold& g = f.grid();
  if (f.degree() != g.dim())
    throw std::invalid_argument("integrate_top: degree mismatch");
  std::int64_t nn = g.node_count();
  std::vector<double> buf(nn);
  int ia = g.interval_axis();
  double cell = 1.0;
  for (int a = 0; a < g.dim(); ++a)
    if (a != ia) cell *= g.spacing(a);
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double w = (ia >= 0) ? g.axis_weight(ia, g.axis_index(node, ia)) : 1.0;
    buf[node] = f.at(node, 0) * w;
  }
  return orientation * cell * pairwise_sum(buf.data(), nn);
}

}  // namespace gravcs
