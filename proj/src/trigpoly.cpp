#include "gravcs/trigpoly.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace gravcs {

namespace {
constexpr double two_pi = 6.28318530717958647692;
}

TrigPoly::TrigPoly(int dim, const std::array<double, 4>& periods)
    : dim_(dim), periods_(periods) {
  if (dim < 1 || dim > max_dim)
    throw std::invalid_argument("trig poly dimension must be in 1..4");
  for (int a = 0; a < dim; ++a)
    if (periods[a] <= 0.0)
      throw std::invalid_argument("trig poly periods must be positive");
}

void TrigPoly::add_term(const std::array<int, 4>& k, double amp_cos,
                        double amp_sin) {
  terms_.push_back(TrigTerm{k, amp_cos, amp_sin});
}

double TrigPoly::eval(const double* x) const {
  double s = 0.0;
  for (const TrigTerm& t : terms_) {
    double ph = 0.0;
    for (int a = 0; a < dim_; ++a) ph += two_pi * t.k[a] * x[a] / periods_[a];
    s += t.amp_cos * std::cos(ph) + t.amp_sin * std::sin(ph);
  }
  return s;
}

double TrigPoly::deriv(const double* x, int axis) const {
  double s = 0.0;
  for (const TrigTerm& t : terms_) {
    double ph = 0.0;
    for (int a = 0; a < dim_; ++a) ph += two_pi * t.k[a] * x[a] / periods_[a];
    double w = two_pi * t.k[axis] / periods_[axis];
    s += w * (-t.amp_cos * std::sin(ph) + t.amp_sin * std::cos(ph));
  }
  return s;
}

double TrigPoly::deriv2(const double* x, int a, int b) const {
  double s = 0.0;
  for (const TrigTerm& t : terms_) {
    double ph = 0.0;
    for (int ax = 0; ax < dim_; ++ax)
      ph += two_pi * t.k[ax] * x[ax] / periods_[ax];
    double wa = two_pi * t.k[a] / periods_[a];
    double wb = two_pi * t.k[b] / periods_[b];
    s -= wa * wb * (t.amp_cos * std::cos(ph) + t.amp_sin * std::sin(ph));
  }
  return s;
}

double TrigPoly::gradient_bound(int axis) const {
  double s = 0.0;
  for (const TrigTerm& t : terms_)
    s += std::fabs(two_pi * t.k[axis] / periods_[axis]) *
         std::hypot(t.amp_cos, t.amp_sin);
  return s;
}

void TrigPoly::prune(double rel_eps) {
  double top = 0.0;
  for (const TrigTerm& t : terms_)
    top = std::max(top, std::fabs(t.amp_cos) + std::fabs(t.amp_sin));
  if (top == 0.0) {
    terms_.clear();
    return;
  }
  std::vector<TrigTerm> kept;
  for (const TrigTerm& t : terms_)
    if (std::fabs(t.amp_cos) + std::fabs(t.amp_sin) >= rel_eps * top)
      kept.push_back(t);
  terms_ = std::move(kept);
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  // merge by frequency so repeated accumulation does not balloon the sum
  std::map<std::array<int, 4>, std::pair<double, double>> acc;
  for (const TrigTerm& t : terms_) {
    acc[t.k].first += t.amp_cos;
    acc[t.k].second += t.amp_sin;
  }
  for (const TrigTerm& t : o.terms_) {
    acc[t.k].first += t.amp_cos;
    acc[t.k].second += t.amp_sin;
  }
  terms_.clear();
  for (const auto& [k, ab] : acc)
    terms_.push_back(TrigTerm{k, ab.first, ab.second});
  return *this;
}

TrigPoly TrigPoly::scaled(double s) const {
  TrigPoly out = *this;
  for (TrigTerm& t : out.terms_) {
    t.amp_cos *= s;
    t.amp_sin *= s;
  }
  return out;
}

TrigPoly TrigPoly::fit(const GridManifold& g, const std::vector<double>& nodal,
                       double prune_rel_eps) {
  if (!g.all_periodic())
    throw std::invalid_argument("trig fit needs a fully periodic grid");
  if (static_cast<std::int64_t>(nodal.size()) != g.node_count())
    throw std::invalid_argument("trig fit: sample count != node count");

  // separable forward DFT, one axis at a time
  std::vector<std::complex<double>> c(nodal.begin(), nodal.end());
  std::vector<std::complex<double>> line, out;
  for (int axis = 0; axis < g.dim(); ++axis) {
    int n = g.axis(axis).nodes;
    std::int64_t stride = g.stride(axis);
    std::int64_t nlines = g.node_count() / n;
    line.resize(n);
    out.resize(n);
    for (std::int64_t l = 0; l < nlines; ++l) {
      // base index of the l-th line along this axis
      std::int64_t lo = l % stride, hi = l / stride;
      std::int64_t base = hi * stride * n + lo;
      for (int m = 0; m < n; ++m) line[m] = c[base + m * stride];
      for (int j = 0; j < n; ++j) {
        std::complex<double> s = 0.0;
        for (int m = 0; m < n; ++m) {
          double ph = -two_pi * j * m / n;
          s += line[m] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out[j] = s / static_cast<double>(n);
      }
      for (int j = 0; j < n; ++j) c[base + j * stride] = out[j];
    }
  }

  std::array<double, 4> periods{1, 1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) periods[a] = g.axis(a).period;
  TrigPoly p(g.dim(), periods);

  // signed frequency for DFT bin j; Nyquist (even n) lands on +n/2
  auto signed_k = [](int j, int n) { return j <= n / 2 ? j : j - n; };

  for (std::int64_t flat = 0; flat < g.node_count(); ++flat) {
    std::array<int, 4> k{};
    bool canonical = true, self_paired = true;
    for (int a = 0; a < g.dim(); ++a) {
      int n = g.axis(a).nodes;
      k[a] = signed_k(g.axis_index(flat, a), n);
      if (k[a] != 0 && !(n % 2 == 0 && k[a] == n / 2)) self_paired = false;
    }
    // keep one representative of each conjugate pair.  Entries at 0 or at
    // the (even-n) Nyquist frequency are shared with the partner, so the
    // first entry beyond those decides.
    if (!self_paired) {
      for (int a = 0; a < g.dim(); ++a) {
        int n = g.axis(a).nodes;
        if (k[a] == 0 || (n % 2 == 0 && k[a] == n / 2)) continue;
        canonical = (k[a] > 0);
        break;
      }
    }
    if (!canonical) continue;
    std::complex<double> coef = c[flat];
    double ac, as;
    if (self_paired) {
      // self-conjugate bins (all entries 0 or Nyquist): pure cosine on nodes
      ac = coef.real();
      as = 0.0;
    } else {
      ac = 2.0 * coef.real();
      as = -2.0 * coef.imag();
    }
    if (ac != 0.0 || as != 0.0) p.add_term(k, ac, as);
  }
  p.prune(prune_rel_eps);
  return p;
}

}  // namespace gravcs
