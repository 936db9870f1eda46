#pragma once

#include <cstdint>
#include <vector>

#include "gravcs/grid.hpp"
#include "gravcs/multiindex.hpp"

namespace gravcs {

// Differential q-form sampled at grid nodes: one coefficient per node per
// sorted multi-index i1<...<iq.  Storage is node-major, components inner.
class FormField {
 public:
  FormField() = default;
  FormField(const GridManifold& grid, int degree);

  const GridManifold& grid() const { return grid_; }
  int degree() const { return degree_; }
  int comp_count() const { return ncomp_; }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }

  double& at(std::int64_t node, int c) { return v_[node * ncomp_ + c]; }
  double at(std::int64_t node, int c) const { return v_[node * ncomp_ + c]; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

 private:
  GridManifold grid_;
  int degree_ = 0;
  int ncomp_ = 1;
  std::vector<double> v_;
};

// Matrix-valued q-form: rank x rank matrix per (node, multi-index).  The
// matrix rank is independent of the base dimension (a rank-3 connection can
// live on a 4-dim product grid).
class MatrixFormField {
 public:
  MatrixFormField() = default;
  MatrixFormField(const GridManifold& grid, int degree, int rank);

  const GridManifold& grid() const { return grid_; }
  int degree() const { return degree_; }
  int rank() const { return rank_; }
  int comp_count() const { return ncomp_; }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }

  // pointer to the rank x rank block of component c at a node (row-major)
  double* block(std::int64_t node, int c) {
    return v_.data() + (node * ncomp_ + c) * rank_ * rank_;
  }
  const double* block(std::int64_t node, int c) const {
    return v_.data() + (node * ncomp_ + c) * rank_ * rank_;
  }
  double& at(std::int64_t node, int c, int a, int b) {
    return block(node, c)[a * rank_ + b];
  }
  double at(std::int64_t node, int c, int a, int b) const {
    return block(node, c)[a * rank_ + b];
  }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

 private:
  GridManifold grid_;
  int degree_ = 0;
  int rank_ = 0;
  int ncomp_ = 1;
  std::vector<double> v_;
};

}  // namespace gravcs
