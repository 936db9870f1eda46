#pragma once

// Plain single-threaded reference versions of the field kernels.  These are
// written independently of the OpenMP implementations (naive odometer loops,
// no stride tricks) so the two can be compared in tests and benchmarks.

#include "gravcs/form.hpp"

namespace gravcs::serial {

FormField partial_derivative(const FormField& f, int axis);
MatrixFormField partial_derivative(const MatrixFormField& f, int axis);

FormField exterior_derivative(const FormField& f);
MatrixFormField exterior_derivative(const MatrixFormField& f);

FormField wedge(const FormField& a, const FormField& b);
MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b);

FormField trace(const MatrixFormField& a);

double integrate_top(const FormField& f);

}  // namespace gravcs::serial
