#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gravcs {

// Structured periodic grids modelling flat-chart compact manifolds: an
// n-torus, or an (n-1)-torus crossed with the unit interval.  Coordinates on
// a periodic axis run over [0, L) with N equally spaced nodes (h = L/N, the
// node at L is identified with the one at 0); the interval axis carries both
// endpoints (h = 1/(N-1), nodes at 0 and 1 included).
enum class Topology { torus, torus_interval };

inline constexpr int max_dim = 4;

struct Axis {
  int nodes = 0;
  double period = 1.0;  // ignored for the interval axis (range is [0,1])
  bool periodic = true;
};

class GridManifold {
 public:
  GridManifold() = default;
  GridManifold(int dim, const std::vector<int>& node_counts,
               const std::vector<double>& periods, int orientation,
               Topology topology, int interval_axis = -1);

  int dim() const { return dim_; }
  int orientation() const { return orientation_; }
  Topology topology() const { return topology_; }
  int interval_axis() const { return interval_axis_; }
  const Axis& axis(int a) const { return axes_[a]; }
  std::int64_t node_count() const { return node_count_; }
  std::int64_t stride(int a) const { return strides_[a]; }

  double spacing(int a) const {
    const Axis& ax = axes_[a];
    return ax.periodic ? ax.period / ax.nodes : 1.0 / (ax.nodes - 1);
  }

  // index of a node along one axis, extracted from the flat node index
  int axis_index(std::int64_t node, int a) const {
    return static_cast<int>((node / strides_[a]) % axes_[a].nodes);
  }

  void node_coords(std::int64_t node, double* x) const {
    for (int a = 0; a < dim_; ++a) x[a] = axis_index(node, a) * spacing(a);
  }

  std::int64_t node_index(const int* idx) const {
    std::int64_t n = 0;
    for (int a = 0; a < dim_; ++a) n += idx[a] * strides_[a];
    return n;
  }

  // integration weight along one axis at a given position.  Periodic axes use
  // the plain cell width h (trapezoid = rectangle there); the interval axis
  // uses 4th-order end-corrected trapezoid weights (3/8, 7/6, 23/24, 1, ...)
  // so top-form integrals keep the advertised refinement order.
  double axis_weight(int a, int pos) const;

  bool same_shape(const GridManifold& o) const;
  std::string describe() const;

  bool all_periodic() const {
    for (int a = 0; a < dim_; ++a)
      if (!axes_[a].periodic) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::array<Axis, max_dim> axes_{};
  int orientation_ = +1;
  Topology topology_ = Topology::torus;
  int interval_axis_ = -1;
  std::array<std::int64_t, max_dim> strides_{};
  std::int64_t node_count_ = 0;
};

// convenience factory mirroring the constructor
GridManifold build_grid(int dim, const std::vector<int>& node_counts,
                        const std::vector<double>& periods, int orientation,
                        Topology topology, int interval_axis = -1);

}  // namespace gravcs
