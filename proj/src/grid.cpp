#include "gravcs/grid.hpp"

#include <sstream>
#include <stdexcept>

namespace gravcs {

GridManifold::GridManifold(int dim, const std::vector<int>& node_counts,
                           const std::vector<double>& periods, int orientation,
                           Topology topology, int interval_axis)
    : dim_(dim), orientation_(orientation), topology_(topology),
      interval_axis_(interval_axis) {
  if (dim < 1 || dim > max_dim)
    throw std::invalid_argument("grid dimension must be in 1..4");
  if (static_cast<int>(node_counts.size()) != dim ||
      static_cast<int>(periods.size()) != dim)
    throw std::invalid_argument("node_counts/periods size must equal dim");
  if (orientation != +1 && orientation != -1)
    throw std::invalid_argument("orientation must be +1 or -1");

  if (topology == Topology::torus) {
    if (interval_axis != -1)
      throw std::invalid_argument("torus topology admits no interval axis");
  } else {
    if (interval_axis < 0 || interval_axis >= dim)
      throw std::invalid_argument(
          "torus_interval topology needs exactly one interval axis in range");
  }

  for (int a = 0; a < dim; ++a) {
    if (node_counts[a] < 4)
      throw std::invalid_argument("node count below stencil width (min 4) on axis " +
                                  std::to_string(a));
    bool periodic = (a != interval_axis);
    if (!periodic && node_counts[a] < 7)
      throw std::invalid_argument(
          "interval axis needs at least 7 nodes for one-sided stencils and "
          "end-corrected weights");
    if (periodic && periods[a] <= 0.0)
      throw std::invalid_argument("period must be positive on axis " +
                                  std::to_string(a));
    axes_[a] = Axis{node_counts[a], periodic ? periods[a] : 1.0, periodic};
  }

  node_count_ = 1;
  for (int a = dim - 1; a >= 0; --a) {  // row-major, last axis fastest
    strides_[a] = node_count_;
    node_count_ *= node_counts[a];
  }
}

double GridManifold::axis_weight(int a, int pos) const {
  const Axis& ax = axes_[a];
  double h = spacing(a);
  if (ax.periodic) return h;
  int n = ax.nodes;
  int d = pos < n - 1 - pos ? pos : n - 1 - pos;  // distance to nearest end
  switch (d) {
    case 0: return 3.0 / 8.0 * h;
    case 1: return 7.0 / 6.0 * h;
    case 2: return 23.0 / 24.0 * h;
    default: return h;
  }
}

bool GridManifold::same_shape(const GridManifold& o) const {
  if (dim_ != o.dim_ || topology_ != o.topology_ ||
      interval_axis_ != o.interval_axis_)
    return false;
  for (int a = 0; a < dim_; ++a)
    if (axes_[a].nodes != o.axes_[a].nodes ||
        axes_[a].period != o.axes_[a].period ||
        axes_[a].periodic != o.axes_[a].periodic)
      return false;
  return true;
}

GridManifold build_grid(int dim, const std::vector<int>& node_counts,
                        const std::vector<double>& periods, int orientation,
                        Topology topology, int interval_axis) {
  return GridManifold(dim, node_counts, periods, orientation, topology,
                      interval_axis);
}

std::string GridManifold::describe() const {
  std::ostringstream os;
  os << (topology_ == Topology::torus ? "T^" : "T^(n-1)xI ") << dim_ << " [";
  for (int a = 0; a < dim_; ++a) {
    if (a) os << "x";
    os << axes_[a].nodes;
    if (!axes_[a].periodic) os << "i";
  }
  os << "]";
  return os.str();
}

}  // namespace gravcs
