#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gravcs/charclass.hpp"
#include "gravcs/diffeo.hpp"
#include "gravcs/form.hpp"
#include "gravcs/metric.hpp"

namespace gravcs {

// Directional derivative of the action at g along a symmetric tensor h
// (degree-0 matrix form on the same grid): central difference
// (CS(g+sh) - CS(g-sh)) / 2s with step s = 1e-4 * |g|_rms / |h|_rms,
// Richardson-extrapolated once.  Both shifted metrics are nodal, so the two
// action evaluations share one derivative path and truncation cancels in the
// difference.  The background drops out of the difference (background-shift
// identity), so a fixed flat background is used internally.  When g +/- sh
// fails positive definiteness the step is halved; it is an error for the
// step to underflow below 1e-12 of its initial value.
double sigma_pairing(const InvariantPolynomial& p, const OrientedMetric& g,
                     const MatrixFormField& h);

// Classical Cotton tensor of a 3-metric as a contravariant symmetric
// density:
//   C^{ij} = eps~^{ikl} nabla_k (Ric^j_l - 1/4 R delta^j_l), symmetrized,
// with eps~ the permutation symbol (weight +1 density, no volume factor).
// Evaluated entirely on the stencil-derivative path for consistency with
// the pairing route.  Degree-0 matrix form; dim must be 3.
MatrixFormField cotton_classical(const MetricField& g);

// orientation-signed integral of C^{ij} h_{ij} over the grid; C is a
// density, so the coordinate measure needs no volume factor
double cotton_pairing(const MatrixFormField& cotton, const MatrixFormField& h,
                      int orientation);

// Proportionality between the two routes for p = tr(A^2):
//   cotton_pairing(cotton_classical(g), h) == kCottonNormalization *
//   sigma_pairing(tr^2, g, h).
// Derivation in docs/cotton_normalization.md.
inline constexpr double kCottonNormalization = -0.5;

// Metrics sampled on a uniform s-grid over [0, 1], all on one grid manifold
// with a shared orientation.  A declared glue map phi asserts the endpoint
// relation gamma(1) = phi . gamma(0), verified within `endpoint_tol` at
// construction.  Every sample must be positive definite.
class MetricPath {
 public:
  // free endpoints
  MetricPath(std::vector<MetricField> samples, int orientation);
  // endpoint relation gamma(1) = phi . gamma(0) declared and checked
  MetricPath(std::vector<MetricField> samples, int orientation,
             const Diffeomorphism& glue, double endpoint_tol = 1e-10);

  int sample_count() const { return static_cast<int>(samples_.size()); }
  const MetricField& sample(int k) const { return samples_[k]; }
  int orientation() const { return orientation_; }
  bool has_glue() const { return glue_.has_value(); }
  const Diffeomorphism& glue() const { return *glue_; }

 private:
  void validate();
  std::vector<MetricField> samples_;
  int orientation_ = +1;
  std::optional<Diffeomorphism> glue_;
};

// straight-line interpolation (1-u) g0 + u g1 with `samples` nodal samples
// (>= 3); free endpoints
MetricPath linear_metric_path(const OrientedMetric& g0, const MetricField& g1,
                              int samples);

// straight line from g to phi . g, declared to close up under phi
MetricPath linear_path_to_image(const Diffeomorphism& phi,
                                const OrientedMetric& g, int samples);

// Line integral of the action 1-form along the path: composite quadrature
// of sigma_pairing(p, gamma(s), gamma'(s)) over s, with gamma' from
// finite differences in s (4th order when >= 5 samples) and 4th-order
// end-corrected weights (>= 6 samples; Simpson-type rules below that).
double path_integral_sigma(const InvariantPolynomial& p,
                           const MetricPath& gamma);

// glue map with an externally supplied holonomy value kappa (mod 1);
// a missing kappa marks the entry to be skipped
struct FlatHolonomyDatum {
  std::string name;
  Diffeomorphism phi;
  std::optional<double> kappa;
};

struct HolonomyVerdict {
  std::string name;
  bool skipped = false;   // no kappa supplied
  double p_value = 0.0;   // characteristic number of the mapping torus
  double distance = 0.0;  // d_Z(kappa, p_value), 0 when skipped
  bool pass = true;
};

// distance from x to the nearest integer: min_k |x - k|
double integer_distance(double x);

// For each datum, builds the mapping torus of phi over g and reports the
// mod-1 distance between the supplied kappa and the computed characteristic
// number, pass iff distance < tol.  Entries without kappa are skipped with
// pass left true.
std::vector<HolonomyVerdict> flat_holonomy_check(
    const InvariantPolynomial& p, const std::vector<FlatHolonomyDatum>& data,
    const OrientedMetric& g, double eps, int t_nodes, double tol = 1e-3);

}  // namespace gravcs
