#pragma once

#include <cstdint>

#include "gravcs/form.hpp"

namespace gravcs {

// Node-parallel field kernels (OpenMP).  Every kernel writes disjoint
// per-node outputs, so results are bitwise independent of the thread count;
// reductions go through pairwise_sum with a fixed tree.

// deterministic pairwise summation (fixed reduction tree, any thread count)
double pairwise_sum(const double* v, std::int64_t n);

// 4th-order partial derivative along an axis (wraparound on periodic axes,
// one-sided 5-point stencils at interval ends)
FormField partial_derivative(const FormField& f, int axis);
MatrixFormField partial_derivative(const MatrixFormField& f, int axis);

// antisymmetrized derivative, degree q -> q+1
FormField exterior_derivative(const FormField& f);
MatrixFormField exterior_derivative(const MatrixFormField& f);

// graded wedge products; the matrix variant multiplies matrices in order
FormField wedge(const FormField& a, const FormField& b);
MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b);

// matrix trace per (node, multi-index)
FormField trace(const MatrixFormField& a);

// out = c0*f0 + c1*f1 (+ c2*f2), all same shape
void lincomb(MatrixFormField& out, double c0, const MatrixFormField& f0,
             double c1, const MatrixFormField& f1);
void lincomb(MatrixFormField& out, double c0, const MatrixFormField& f0,
             double c1, const MatrixFormField& f1, double c2,
             const MatrixFormField& f2);
void axpy(FormField& y, double a, const FormField& x);
void axpy(MatrixFormField& y, double a, const MatrixFormField& x);
void scale(FormField& y, double a);

MatrixFormField subtract(const MatrixFormField& a, const MatrixFormField& b);

// orientation-signed integral of a top-degree form (grid orientation by
// default, or an explicit override sign)
double integrate_top(const FormField& f);
double integrate_top(const FormField& f, int orientation);

// root-mean-square over all stored scalars (deterministic reduction)
double rms(const double* v, std::int64_t n);

double max_abs(const double* v, std::int64_t n);

}  // namespace gravcs
