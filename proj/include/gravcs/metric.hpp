#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gravcs/form.hpp"
#include "gravcs/trigpoly.hpp"

namespace gravcs {

// Closed-form metric family: exact component values and first derivatives at
// arbitrary points.  Derivative-heavy code paths (Christoffel assembly,
// pullbacks) use the generator when present and fall back to stencils.
class MetricGenerator {
 public:
  virtual ~MetricGenerator() = default;
  virtual int dim() const = 0;
  // g_{ij}(x), row-major dim x dim
  virtual void eval(const double* x, double* g) const = 0;
  // d g_{ij} / d x_axis
  virtual void eval_deriv(const double* x, int axis, double* dg) const = 0;
};

// g = delta
class FlatGenerator final : public MetricGenerator {
 public:
  explicit FlatGenerator(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  void eval(const double* x, double* g) const override;
  void eval_deriv(const double* x, int axis, double* dg) const override;

 private:
  int dim_;
};

// g = exp(2 f) delta with f a trig polynomial
class ConformalGenerator final : public MetricGenerator {
 public:
  ConformalGenerator(int dim, TrigPoly f) : dim_(dim), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  const TrigPoly& factor() const { return f_; }
  void eval(const double* x, double* g) const override;
  void eval_deriv(const double* x, int axis, double* dg) const override;

 private:
  int dim_;
  TrigPoly f_;
};

// g = delta + symmetric trig-polynomial perturbation h_{ij}
class TrigMetricGenerator final : public MetricGenerator {
 public:
  // upper triangle (i <= j) in row order; missing entries treated as zero
  TrigMetricGenerator(int dim, std::vector<TrigPoly> upper);
  int dim() const override { return dim_; }
  void eval(const double* x, double* g) const override;
  void eval_deriv(const double* x, int axis, double* dg) const override;

 private:
  int dim_;
  std::vector<TrigPoly> upper_;  // dim*(dim+1)/2 entries
};

// Riemannian metric sampled on the grid (node-major dim x dim blocks held in
// a degree-0 matrix form so the stencil kernels apply directly), optionally
// backed by a generator.
class MetricField {
 public:
  explicit MetricField(const GridManifold& grid);  // flat metric
  MetricField(const GridManifold& grid,
              std::shared_ptr<const MetricGenerator> gen);

  const GridManifold& grid() const { return g_.grid(); }
  int dim() const { return g_.grid().dim(); }

  double at(std::int64_t node, int i, int j) const { return g_.at(node, 0, i, j); }
  double& at(std::int64_t node, int i, int j) { return g_.at(node, 0, i, j); }

  const MatrixFormField& tensor() const { return g_; }
  MatrixFormField& tensor() { return g_; }

  bool has_generator() const { return gen_ != nullptr; }
  const MetricGenerator& generator() const { return *gen_; }
  std::shared_ptr<const MetricGenerator> generator_ptr() const { return gen_; }
  void drop_generator() { gen_.reset(); }

  // symmetric-factorization check at every node; throws naming the first
  // offending node
  void check_positive_definite() const;

  // nodal g + s*h (h a degree-0 symmetric matrix form); drops the generator
  MetricField shifted(const MatrixFormField& h, double s) const;

  double rms_norm() const;

 private:
  MatrixFormField g_;  // degree 0, rank dim
  std::shared_ptr<const MetricGenerator> gen_;
};

// metric plus an orientation that may override the grid's sign
struct OrientedMetric {
  MetricField metric;
  int orientation;
};

// seeded random families used across the experiments
TrigPoly random_trig_poly(const GridManifold& g, unsigned seed, double amplitude,
                          int max_mode, int n_terms);
MetricField conformal_metric(const GridManifold& g, const TrigPoly& f);
MetricField random_conformal_metric(const GridManifold& g, unsigned seed,
                                    double amplitude, int max_mode);
MetricField random_bump_metric(const GridManifold& g, unsigned seed,
                               double amplitude, int max_mode);

}  // namespace gravcs
