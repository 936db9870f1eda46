#pragma once

#include "gravcs/metric.hpp"

namespace gravcs {

// Levi-Civita connection in the coordinate frame as a matrix-valued 1-form:
// component i holds the matrix (Gamma^k_{i l})_{k,l} with
// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
// Metric derivatives come from the closed-form generator when present and
// from stencils otherwise.
MatrixFormField levi_civita(const MetricField& g);

// curvature 2-form F = dA + A ^ A
MatrixFormField curvature(const MatrixFormField& A);

}  // namespace gravcs
