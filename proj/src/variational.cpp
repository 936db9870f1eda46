#include "gravcs/variational.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <utility>

#include "gravcs/connection.hpp"
#include "gravcs/kernels.hpp"
#include "gravcs/mappingtorus.hpp"
#include "gravcs/smallmat.hpp"

namespace gravcs {

double sigma_pairing(const InvariantPolynomial& p, const OrientedMetric& g,
                     const MatrixFormField& h) {
  const GridManifold& grid = g.metric.grid();
  if (!grid.same_shape(h.grid()) || h.degree() != 0 ||
      h.rank() != grid.dim())
    throw std::invalid_argument(
        "pairing direction must be a degree-0 symmetric tensor on the "
        "metric grid");
  double hn = rms(h.data(), h.size());
  if (hn == 0.0) return 0.0;  // derivative in the zero direction
  double s = 1e-4 * g.metric.rms_norm() / hn;
  const double floor = s * 1e-12;
  for (;;) {
    try {
      g.metric.shifted(h, s).check_positive_definite();
      g.metric.shifted(h, -s).check_positive_definite();
      break;
    } catch (const std::runtime_error&) {
      s *= 0.5;
      if (s < floor)
        throw std::runtime_error(
            "pairing step size underflowed while restoring positive "
            "definiteness");
    }
  }
  // the half-step metrics are convex combinations of accepted ones, so only
  // the full step needs the positivity probe above
  MatrixFormField A0 = flat_background(grid, grid.dim());
  auto diff = [&](double step) {
    OrientedMetric gp{g.metric.shifted(h, step), g.orientation};
    OrientedMetric gm{g.metric.shifted(h, -step), g.orientation};
    return (cs_action(p, gp, A0) - cs_action(p, gm, A0)) / (2.0 * step);
  };
  double d1 = diff(s);
  double d2 = diff(0.5 * s);
  return (4.0 * d2 - d1) / 3.0;  // one Richardson step
}

namespace {

// component position of dx^i ^ dx^j (i < j) in a 3-dim 2-form
inline int pair_pos3(int i, int j) { return i == 0 ? j - 1 : 2; }

// permutation symbol value for (i, k, l)
inline double eps3(int i, int k, int l) {
  if (i == k || i == l || k == l) return 0.0;
  // parity of the permutation (i,k,l) of (0,1,2)
  return ((k - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

}  // namespace

MatrixFormField cotton_classical(const MetricField& g_in) {
  if (g_in.dim() != 3)
    throw std::invalid_argument("Cotton tensor needs a 3-dimensional metric");
  MetricField g = g_in;
  g.drop_generator();  // one derivative path for every ingredient
  const GridManifold& grid = g.grid();
  MatrixFormField w = levi_civita(g);  // w.at(node, i, k, l) = Gamma^k_{il}
  MatrixFormField F = curvature(w);    // R^a_b over sorted pairs (j < k)

  // S^j_l = Ric^j_l - 1/4 R delta^j_l (the 3-d Schouten-type combination)
  MatrixFormField S(grid, 0, 3);
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < grid.node_count(); ++node) {
    double ginv[9];
    invert_small(g.tensor().block(node, 0), 3, ginv);
    double ric[9];  // Ric_{aj} = R^i_{a i j}
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
          if (i < j)
            v += F.at(node, pair_pos3(i, j), i, a);
          else if (i > j)
            v -= F.at(node, pair_pos3(j, i), i, a);
        }
        ric[a * 3 + j] = v;
      }
    double scal = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j) scal += ginv[a * 3 + j] * ric[a * 3 + j];
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        double v = 0.0;
        for (int m = 0; m < 3; ++m) v += ginv[j * 3 + m] * ric[m * 3 + l];
        S.at(node, 0, j, l) = v - 0.25 * scal * (j == l ? 1.0 : 0.0);
      }
  }

  MatrixFormField dS[3] = {partial_derivative(S, 0), partial_derivative(S, 1),
                           partial_derivative(S, 2)};
  MatrixFormField C(grid, 0, 3);
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < grid.node_count(); ++node) {
    double nab[3][9];  // nabla_k S^j_l
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          double v = dS[k].at(node, 0, j, l);
          for (int c = 0; c < 3; ++c)
            v += w.at(node, k, j, c) * S.at(node, 0, c, l) -
                 w.at(node, k, c, l) * S.at(node, 0, j, c);
          nab[k][j * 3 + l] = v;
        }
    double raw[9];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            if (double e = eps3(i, k, l); e != 0.0) v += e * nab[k][j * 3 + l];
        raw[i * 3 + j] = v;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        C.at(node, 0, i, j) = 0.5 * (raw[i * 3 + j] + raw[j * 3 + i]);
  }
  return C;
}

double cotton_pairing(const MatrixFormField& cotton, const MatrixFormField& h,
                      int orientation) {
  const GridManifold& grid = cotton.grid();
  if (grid.dim() != 3 || cotton.degree() != 0 || cotton.rank() != 3)
    throw std::invalid_argument("Cotton pairing needs a degree-0 rank-3 "
                                "density on a 3-dim grid");
  if (!grid.same_shape(h.grid()) || h.degree() != 0 || h.rank() != 3)
    throw std::invalid_argument("Cotton pairing: incompatible direction");
  FormField dens(grid, 3);
#pragma omp parallel for schedule(static)
  for (std::int64_t node = 0; node < grid.node_count(); ++node) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        v += cotton.at(node, 0, i, j) * h.at(node, 0, i, j);
    dens.at(node, 0) = v;
  }
  return integrate_top(dens, orientation);
}

MetricPath::MetricPath(std::vector<MetricField> samples, int orientation)
    : samples_(std::move(samples)), orientation_(orientation) {
  validate();
}

MetricPath::MetricPath(std::vector<MetricField> samples, int orientation,
                       const Diffeomorphism& glue, double endpoint_tol)
    : samples_(std::move(samples)), orientation_(orientation), glue_(glue) {
  validate();
  OrientedMetric moved =
      apply_diffeo(*glue_, OrientedMetric{samples_.front(), orientation_});
  const MatrixFormField& a = moved.metric.tensor();
  const MatrixFormField& b = samples_.back().tensor();
  double gap = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i)
    gap = std::max(gap, std::fabs(a.data()[i] - b.data()[i]));
  if (gap > endpoint_tol)
    throw std::invalid_argument(
        "declared endpoint relation fails: |gamma(1) - phi.gamma(0)| = " +
        std::to_string(gap));
}

void MetricPath::validate() {
  if (samples_.size() < 2)
    throw std::invalid_argument("metric path needs at least 2 samples");
  if (orientation_ != 1 && orientation_ != -1)
    throw std::invalid_argument("metric path orientation must be +1 or -1");
  const GridManifold& grid = samples_.front().grid();
  for (const MetricField& s : samples_) {
    if (!grid.same_shape(s.grid()))
      throw std::invalid_argument("metric path samples live on different grids");
    s.check_positive_definite();
  }
}

MetricPath linear_metric_path(const OrientedMetric& g0, const MetricField& g1,
                              int samples) {
  if (samples < 3)
    throw std::invalid_argument("linear metric path needs at least 3 samples");
  MatrixFormField diff = subtract(g1.tensor(), g0.metric.tensor());
  std::vector<MetricField> ss;
  ss.reserve(samples);
  for (int k = 0; k < samples; ++k)
    ss.push_back(g0.metric.shifted(diff, double(k) / (samples - 1)));
  return MetricPath(std::move(ss), g0.orientation);
}

MetricPath linear_path_to_image(const Diffeomorphism& phi,
                                const OrientedMetric& g, int samples) {
  if (samples < 3)
    throw std::invalid_argument("linear metric path needs at least 3 samples");
  OrientedMetric moved = apply_diffeo(phi, g);
  MatrixFormField diff = subtract(moved.metric.tensor(), g.metric.tensor());
  std::vector<MetricField> ss;
  ss.reserve(samples);
  for (int k = 0; k < samples; ++k)
    ss.push_back(g.metric.shifted(diff, double(k) / (samples - 1)));
  return MetricPath(std::move(ss), g.orientation, phi, 1e-9);
}

namespace {

// finite-difference rows for gamma': starting sample index and integer
// coefficients over `denom * h`
struct StencilRow {
  int start;
  std::vector<double> coeff;
  double denom;
};

StencilRow deriv_row(int k, int n) {
  if (n >= 5) {
    if (k == 0) return {0, {-25, 48, -36, 16, -3}, 12};
    if (k == 1) return {0, {-3, -10, 18, -6, 1}, 12};
    if (k == n - 2) return {n - 5, {-1, 6, -18, 10, 3}, 12};
    if (k == n - 1) return {n - 5, {3, -16, 36, -48, 25}, 12};
    return {k - 2, {1, -8, 0, 8, -1}, 12};
  }
  if (n == 4) {
    if (k == 0) return {0, {-11, 18, -9, 2}, 6};
    if (k == 1) return {0, {-2, -3, 6, -1}, 6};
    if (k == 2) return {0, {1, -6, 3, 2}, 6};
    return {0, {-2, 9, -18, 11}, 6};
  }
  // n == 3
  if (k == 0) return {0, {-3, 4, -1}, 2};
  if (k == 1) return {0, {-1, 0, 1}, 2};
  return {0, {1, -4, 3}, 2};
}

std::vector<double> quad_weights(int n, double h) {
  std::vector<double> w(n, h);
  if (n >= 6) {
    w[0] = w[n - 1] = 3.0 / 8.0 * h;
    w[1] = w[n - 2] = 7.0 / 6.0 * h;
    w[2] = w[n - 3] = 23.0 / 24.0 * h;
  } else if (n == 5) {
    double c[5] = {1, 4, 2, 4, 1};
    for (int i = 0; i < 5; ++i) w[i] = c[i] * h / 3.0;
  } else if (n == 4) {
    double c[4] = {1, 3, 3, 1};
    for (int i = 0; i < 4; ++i) w[i] = c[i] * 3.0 * h / 8.0;
  } else {  // n == 3
    double c[3] = {1, 4, 1};
    for (int i = 0; i < 3; ++i) w[i] = c[i] * h / 3.0;
  }
  return w;
}

}  // namespace

double path_integral_sigma(const InvariantPolynomial& p,
                           const MetricPath& gamma) {
  int n = gamma.sample_count();
  if (n < 3)
    throw std::invalid_argument("path integral needs at least 3 samples");
  double h = 1.0 / (n - 1);
  std::vector<double> w = quad_weights(n, h);
  std::vector<double> contrib(n, 0.0);
  for (int k = 0; k < n; ++k) {
    StencilRow row = deriv_row(k, n);
    // difference stencils annihilate constants; honor that exactly so a
    // constant run contributes a hard zero instead of round-off
    const MatrixFormField& first = gamma.sample(row.start).tensor();
    bool constant = true;
    for (std::size_t j = 1; j < row.coeff.size() && constant; ++j) {
      const MatrixFormField& other =
          gamma.sample(row.start + static_cast<int>(j)).tensor();
      constant = std::memcmp(first.data(), other.data(),
                             sizeof(double) * first.size()) == 0;
    }
    if (constant) continue;
    MatrixFormField dir(first.grid(), 0, first.rank());
    for (std::size_t j = 0; j < row.coeff.size(); ++j)
      axpy(dir, row.coeff[j] / (row.denom * h),
           gamma.sample(row.start + static_cast<int>(j)).tensor());
    OrientedMetric at{gamma.sample(k), gamma.orientation()};
    contrib[k] = w[k] * sigma_pairing(p, at, dir);
  }
  return pairwise_sum(contrib.data(), n);
}

double integer_distance(double x) {
  return std::fabs(x - std::nearbyint(x));
}

std::vector<HolonomyVerdict> flat_holonomy_check(
    const InvariantPolynomial& p, const std::vector<FlatHolonomyDatum>& data,
    const OrientedMetric& g, double eps, int t_nodes, double tol) {
  std::vector<HolonomyVerdict> out;
  out.reserve(data.size());
  for (const FlatHolonomyDatum& d : data) {
    HolonomyVerdict v;
    v.name = d.name;
    if (!d.kappa.has_value()) {
      v.skipped = true;  // nothing to compare against
      out.push_back(v);
      continue;
    }
    v.p_value = pontryagin_number(p, build_mapping_torus(d.phi, g, eps, t_nodes));
    v.distance = integer_distance(*d.kappa - v.p_value);
    v.pass = v.distance < tol;
    out.push_back(v);
  }
  return out;
}

}  // namespace gravcs
