#include "gravcs/serial_ref.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gravcs/multiindex.hpp"

namespace gravcs::serial {

namespace {

// 4th-order stencil as (position, coefficient/h) pairs, straight from the
// finite-difference tables; interval ends use the one-sided rows
std::vector<std::pair<int, double>> stencil_at(int i, int n, bool periodic,
                                               double h) {
  std::vector<std::pair<int, double>> s;
  auto wrap = [&](int p) { return ((p % n) + n) % n; };
  if (periodic || (i >= 2 && i <= n - 3)) {
    s = {{wrap(i - 2), 1.0}, {wrap(i - 1), -8.0}, {wrap(i + 1), 8.0},
         {wrap(i + 2), -1.0}};
  } else if (i == 0) {
    s = {{0, -25.0}, {1, 48.0}, {2, -36.0}, {3, 16.0}, {4, -3.0}};
  } else if (i == 1) {
    s = {{0, -3.0}, {1, -10.0}, {2, 18.0}, {3, -6.0}, {4, 1.0}};
  } else if (i == n - 2) {
    s = {{n - 1, 3.0}, {n - 2, 10.0}, {n - 3, -18.0}, {n - 4, 6.0},
         {n - 5, -1.0}};
  } else {
    s = {{n - 1, 25.0}, {n - 2, -48.0}, {n - 3, 36.0}, {n - 4, -16.0},
         {n - 5, 3.0}};
  }
  for (auto& [p, c] : s) c /= 12.0 * h;
  return s;
}

// sign of the permutation sorting `seq` (0 if a repeat shows up)
int perm_sign(std::vector<int> seq) {
  int sign = 1;
  for (size_t i = 0; i < seq.size(); ++i)
    for (size_t j = i + 1; j < seq.size(); ++j) {
      if (seq[i] == seq[j]) return 0;
      if (seq[i] > seq[j]) sign = -sign;
    }
  return sign;
}

template <typename Field>
Field derivative_impl(const Field& f, int axis, std::int64_t slots) {
  const GridManifold& g = f.grid();
  if (axis < 0 || axis >= g.dim())
    throw std::invalid_argument("axis out of range");
  Field out = f;
  const Axis& ax = g.axis(axis);
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    std::array<int, 4> idx{};
    for (int a = 0; a < g.dim(); ++a) idx[a] = g.axis_index(node, a);
    auto st = stencil_at(idx[axis], ax.nodes, ax.periodic, g.spacing(axis));
    for (std::int64_t s = 0; s < slots; ++s) {
      double acc = 0.0;
      for (auto [p, c] : st) {
        auto nb = idx;
        nb[axis] = p;
        acc += c * f.data()[g.node_index(nb.data()) * slots + s];
      }
      out.data()[node * slots + s] = acc;
    }
  }
  return out;
}

}  // namespace

FormField partial_derivative(const FormField& f, int axis) {
  return derivative_impl(f, axis, f.comp_count());
}

MatrixFormField partial_derivative(const MatrixFormField& f, int axis) {
  return derivative_impl(
      f, axis, static_cast<std::int64_t>(f.comp_count()) * f.rank() * f.rank());
}

// (d f)_{j0..jq} = sum_m (-1)^m  d_{j_m} f_{j0.. skip j_m ..jq}
FormField exterior_derivative(const FormField& f) {
  const GridManifold& g = f.grid();
  int q = f.degree();
  if (q >= g.dim())
    throw std::invalid_argument("exterior derivative of a top-degree form");
  FormField out(g, q + 1);
  std::vector<FormField> df;
  for (int a = 0; a < g.dim(); ++a) df.push_back(partial_derivative(f, a));
  const auto& out_combos = combinations(g.dim(), q + 1);
  for (int J = 0; J < out.comp_count(); ++J) {
    const auto& jc = out_combos[J];
    for (int m = 0; m <= q; ++m) {
      std::array<int, 4> rest{};
      int r = 0;
      for (int t = 0; t <= q; ++t)
        if (t != m) rest[r++] = jc[t];
      int src = combo_position(g.dim(), q, rest.data(), q);
      double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      const FormField& dsrc = df[jc[m]];
      for (std::int64_t node = 0; node < g.node_count(); ++node)
        out.at(node, J) += sgn * dsrc.at(node, src);
    }
  }
  return out;
}

MatrixFormField exterior_derivative(const MatrixFormField& f) {
  const GridManifold& g = f.grid();
  int q = f.degree(), rk = f.rank();
  if (q >= g.dim())
    throw std::invalid_argument("exterior derivative of a top-degree form");
  MatrixFormField out(g, q + 1, rk);
  std::vector<MatrixFormField> df;
  for (int a = 0; a < g.dim(); ++a) df.push_back(partial_derivative(f, a));
  const auto& out_combos = combinations(g.dim(), q + 1);
  for (int J = 0; J < out.comp_count(); ++J) {
    const auto& jc = out_combos[J];
    for (int m = 0; m <= q; ++m) {
      std::array<int, 4> rest{};
      int r = 0;
      for (int t = 0; t <= q; ++t)
        if (t != m) rest[r++] = jc[t];
      int src = combo_position(g.dim(), q, rest.data(), q);
      double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      const MatrixFormField& dsrc = df[jc[m]];
      for (std::int64_t node = 0; node < g.node_count(); ++node) {
        const double* S = dsrc.block(node, src);
        double* O = out.block(node, J);
        for (int e = 0; e < rk * rk; ++e) O[e] += sgn * S[e];
      }
    }
  }
  return out;
}

// (a ^ b)_K = sum over splittings K = I disjoint-union J,  sgn(I,J) a_I b_J
FormField wedge(const FormField& a, const FormField& b) {
  const GridManifold& g = a.grid();
  if (!g.same_shape(b.grid()))
    throw std::invalid_argument("wedge: grids differ");
  int qa = a.degree(), qb = b.degree();
  if (qa + qb > g.dim()) throw std::invalid_argument("wedge: degree overflow");
  FormField out(g, qa + qb);
  const auto& ia = combinations(g.dim(), qa);
  const auto& ib = combinations(g.dim(), qb);
  for (int i = 0; i < a.comp_count(); ++i)
    for (int j = 0; j < b.comp_count(); ++j) {
      std::vector<int> concat;
      for (int t = 0; t < qa; ++t) concat.push_back(ia[i][t]);
      for (int t = 0; t < qb; ++t) concat.push_back(ib[j][t]);
      int sgn = perm_sign(concat);
      if (sgn == 0) continue;
      std::sort(concat.begin(), concat.end());
      std::array<int, 4> key{};
      for (size_t t = 0; t < concat.size(); ++t) key[t] = concat[t];
      int K = combo_position(g.dim(), qa + qb, key.data(), qa + qb);
      for (std::int64_t node = 0; node < g.node_count(); ++node)
        out.at(node, K) += sgn * a.at(node, i) * b.at(node, j);
    }
  return out;
}

MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b) {
  const GridManifold& g = a.grid();
  if (!g.same_shape(b.grid()))
    throw std::invalid_argument("wedge: grids differ");
  if (a.rank() != b.rank())
    throw std::invalid_argument("wedge: matrix ranks differ");
  int qa = a.degree(), qb = b.degree(), rk = a.rank();
  if (qa + qb > g.dim()) throw std::invalid_argument("wedge: degree overflow");
  MatrixFormField out(g, qa + qb, rk);
  const auto& ia = combinations(g.dim(), qa);
  const auto& ib = combinations(g.dim(), qb);
  for (int i = 0; i < a.comp_count(); ++i)
    for (int j = 0; j < b.comp_count(); ++j) {
      std::vector<int> concat;
      for (int t = 0; t < qa; ++t) concat.push_back(ia[i][t]);
      for (int t = 0; t < qb; ++t) concat.push_back(ib[j][t]);
      int sgn = perm_sign(concat);
      if (sgn == 0) continue;
      std::sort(concat.begin(), concat.end());
      std::array<int, 4> key{};
      for (size_t t = 0; t < concat.size(); ++t) key[t] = concat[t];
      int K = combo_position(g.dim(), qa + qb, key.data(), qa + qb);
      for (std::int64_t node = 0; node < g.node_count(); ++node) {
        const double* A = a.block(node, i);
        const double* B = b.block(node, j);
        double* O = out.block(node, K);
        for (int p = 0; p < rk; ++p)
          for (int q = 0; q < rk; ++q) {
            double acc = 0.0;
            for (int m = 0; m < rk; ++m) acc += A[p * rk + m] * B[m * rk + q];
            O[p * rk + q] += sgn * acc;
          }
      }
    }
  return out;
}

FormField trace(const MatrixFormField& a) {
  FormField out(a.grid(), a.degree());
  for (std::int64_t node = 0; node < a.grid().node_count(); ++node)
    for (int c = 0; c < a.comp_count(); ++c) {
      double t = 0.0;
      for (int p = 0; p < a.rank(); ++p) t += a.at(node, c, p, p);
      out.at(node, c) = t;
    }
  return out;
}

double integrate_top(const FormField& f) {
  const GridManifold& g = f.grid();
  if (f.degree() != g.dim())
    throw std::invalid_argument("integrate_top: degree mismatch");
  double total = 0.0;
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    double w = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Axis& ax = g.axis(a);
      double h = g.spacing(a);
      if (ax.periodic) {
        w *= h;
      } else {
        // 4th-order end-corrected trapezoid weights 3/8, 7/6, 23/24, 1, ...
        int pos = g.axis_index(node, a);
        int d = std::min(pos, ax.nodes - 1 - pos);
        double c = (d == 0) ? 3.0 / 8.0 : (d == 1) ? 7.0 / 6.0
                   : (d == 2)           ? 23.0 / 24.0
                                        : 1.0;
        w *= c * h;
      }
    }
    total += w * f.at(node, 0);
  }
  return g.orientation() * total;
}

}  // namespace gravcs::serial
