#pragma once

// n x n helpers for n <= 4 (metric blocks, Jacobians).  Row-major storage.

#include <cmath>
#include <stdexcept>

namespace gravcs {

inline void invert_small(const double* a, int n, double* inv) {
  // Gauss-Jordan with partial pivoting on an augmented copy
  double m[4][8];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = a[i * n + j];
      m[i][n + j] = (i == j) ? 1.0 : 0.0;
    }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0)
      throw std::runtime_error("singular matrix in invert_small");
    if (piv != col)
      for (int j = 0; j < 2 * n; ++j) std::swap(m[piv][j], m[col][j]);
    double d = m[col][col];
    for (int j = 0; j < 2 * n; ++j) m[col][j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = m[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 2 * n; ++j) m[r][j] -= f * m[col][j];
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i * n + j] = m[i][n + j];
}

inline double det_small(const double* a, int n) {
  if (n == 1) return a[0];
  if (n == 2) return a[0] * a[3] - a[1] * a[2];
  if (n == 3)
    return a[0] * (a[4] * a[8] - a[5] * a[7]) -
           a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  double d = 0.0;  // n == 4: expand along the first row
  for (int c = 0; c < 4; ++c) {
    double sub[9];
    int t = 0;
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (j != c) sub[t++] = a[i * 4 + j];
    d += ((c % 2) ? -1.0 : 1.0) * a[c] * det_small(sub, 3);
  }
  return d;
}

inline long long det_small_int(const long long* a, int n) {
  if (n == 1) return a[0];
  if (n == 2) return a[0] * a[3] - a[1] * a[2];
  if (n == 3)
    return a[0] * (a[4] * a[8] - a[5] * a[7]) -
           a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  long long d = 0;
  for (int c = 0; c < 4; ++c) {
    long long sub[9];
    int t = 0;
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (j != c) sub[t++] = a[i * 4 + j];
    d += ((c % 2) ? -1LL : 1LL) * a[c] * det_small_int(sub, 3);
  }
  return d;
}

}  // namespace gravcs
