#include "gravcs/metric.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gravcs {

void FlatGenerator::eval(const double*, double* g) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g[i * dim_ + j] = (i == j) ? 1.0 : 0.0;
}

void FlatGenerator::eval_deriv(const double*, int, double* dg) const {
  for (int i = 0; i < dim_ * dim_; ++i) dg[i] = 0.0;
}

void ConformalGenerator::eval(const double* x, double* g) const {
  double e = std::exp(2.0 * f_.eval(x));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g[i * dim_ + j] = (i == j) ? e : 0.0;
}

void ConformalGenerator::eval_deriv(const double* x, int axis,
                                    double* dg) const {
  double e = std::exp(2.0 * f_.eval(x));
  double de = 2.0 * f_.deriv(x, axis) * e;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) dg[i * dim_ + j] = (i == j) ? de : 0.0;
}

TrigMetricGenerator::TrigMetricGenerator(int dim, std::vector<TrigPoly> upper)
    : dim_(dim), upper_(std::move(upper)) {
  size_t want = static_cast<size_t>(dim * (dim + 1) / 2);
  if (upper_.size() != want)
    throw std::invalid_argument("trig metric needs dim*(dim+1)/2 components");
}

void TrigMetricGenerator::eval(const double* x, double* g) const {
  int t = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      double v = upper_[t++].eval(x) + (i == j ? 1.0 : 0.0);
      g[i * dim_ + j] = v;
      g[j * dim_ + i] = v;
    }
}

void TrigMetricGenerator::eval_deriv(const double* x, int axis,
                                     double* dg) const {
  int t = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      double v = upper_[t++].deriv(x, axis);
      dg[i * dim_ + j] = v;
      dg[j * dim_ + i] = v;
    }
}

MetricField::MetricField(const GridManifold& grid)
    : MetricField(grid, std::make_shared<FlatGenerator>(grid.dim())) {}

MetricField::MetricField(const GridManifold& grid,
                         std::shared_ptr<const MetricGenerator> gen)
    : g_(grid, 0, grid.dim()), gen_(std::move(gen)) {
  if (gen_->dim() != grid.dim())
    throw std::invalid_argument("metric generator dimension mismatch");
  int n = grid.dim();
  std::int64_t nn = grid.node_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < nn; ++node) {
    double x[4];
    grid.node_coords(node, x);
    double buf[16];
    gen_->eval(x, buf);
    double* b = g_.block(node, 0);
    for (int e = 0; e < n * n; ++e) b[e] = buf[e];
  }
}

void MetricField::check_positive_definite() const {
  const GridManifold& gr = grid();
  int n = gr.dim();
  for (std::int64_t node = 0; node < gr.node_count(); ++node) {
    // Cholesky; failure of any pivot breaks positive-definiteness
    double a[16];
    const double* b = g_.block(node, 0);
    for (int e = 0; e < n * n; ++e) a[e] = b[e];
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      for (int m = 0; m < k; ++m) a[k * n + k] -= a[k * n + m] * a[k * n + m];
      if (a[k * n + k] <= 0.0) {
        ok = false;
        break;
      }
      a[k * n + k] = std::sqrt(a[k * n + k]);
      for (int i = k + 1; i < n; ++i) {
        double s = g_.block(node, 0)[i * n + k];
        for (int m = 0; m < k; ++m) s -= a[i * n + m] * a[k * n + m];
        a[i * n + k] = s / a[k * n + k];
      }
    }
    if (!ok) {
      std::ostringstream os;
      os << "metric not positive definite at node " << node << " (";
      double x[4];
      gr.node_coords(node, x);
      for (int ax = 0; ax < n; ++ax) os << (ax ? ", " : "") << x[ax];
      os << ")";
      throw std::runtime_error(os.str());
    }
  }
}

MetricField MetricField::shifted(const MatrixFormField& h, double s) const {
  if (!grid().same_shape(h.grid()) || h.degree() != 0 || h.rank() != dim())
    throw std::invalid_argument("metric shift: incompatible tensor");
  MetricField out = *this;
  out.drop_generator();
  std::int64_t n = out.g_.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.g_.data()[i] += s * h.data()[i];
  return out;
}

double MetricField::rms_norm() const {
  long double acc = 0.0;
  for (std::int64_t i = 0; i < g_.size(); ++i)
    acc += static_cast<long double>(g_.data()[i]) * g_.data()[i];
  return std::sqrt(static_cast<double>(acc / g_.size()));
}

TrigPoly random_trig_poly(const GridManifold& g, unsigned seed, double amplitude,
                          int max_mode, int n_terms) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> kd(-max_mode, max_mode);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::array<double, 4> periods{1, 1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) periods[a] = g.axis(a).period;
  TrigPoly p(g.dim(), periods);
  for (int t = 0; t < n_terms; ++t) {
    std::array<int, 4> k{};
    bool zero = true;
    while (zero) {
      for (int a = 0; a < g.dim(); ++a) {
        k[a] = kd(rng);
        if (k[a] != 0) zero = false;
      }
    }
    p.add_term(k, amplitude * amp(rng), amplitude * amp(rng));
  }
  return p;
}

MetricField conformal_metric(const GridManifold& g, const TrigPoly& f) {
  return MetricField(g, std::make_shared<ConformalGenerator>(g.dim(), f));
}

MetricField random_conformal_metric(const GridManifold& g, unsigned seed,
                                    double amplitude, int max_mode) {
  return conformal_metric(g, random_trig_poly(g, seed, amplitude, max_mode, 5));
}

MetricField random_bump_metric(const GridManifold& g, unsigned seed,
                               double amplitude, int max_mode) {
  int n = g.dim();
  std::vector<TrigPoly> upper;
  unsigned s = seed;
  for (int i = 0; i < n * (n + 1) / 2; ++i)
    upper.push_back(random_trig_poly(g, s++ * 7919u + seed, amplitude, max_mode, 3));
  MetricField m(g, std::make_shared<TrigMetricGenerator>(n, std::move(upper)));
  m.check_positive_definite();
  return m;
}

}  // namespace gravcs
