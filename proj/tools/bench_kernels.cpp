// Paired benchmarks: every stencil/assembly kernel with a serial reference
// gets timed in both flavors on the same inputs, so the OpenMP speedup (and
// any regression) is visible directly.  Run ./bench_kernels, optionally with
// --benchmark_filter=wedge etc.

#include <benchmark/benchmark.h>

#include "gravcs/charclass.hpp"
#include "gravcs/connection.hpp"
#include "gravcs/kernels.hpp"
#include "gravcs/serial_ref.hpp"

using namespace gravcs;

namespace {

GridManifold torus3(int n) {
  return GridManifold(3, {n, n, n}, {1, 1, 1}, +1, Topology::torus);
}

MatrixFormField connection_form(int n, unsigned seed) {
  return random_connection(torus3(n), 3, seed, 0.1, 2);
}

const InvariantPolynomial& trsq() {
  static const InvariantPolynomial p = InvariantPolynomial::tr_square();
  return p;
}

void partial_derivative_openmp(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(partial_derivative(A, 1));
}

void partial_derivative_serial(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::partial_derivative(A, 1));
}

void exterior_derivative_openmp(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(exterior_derivative(A));
}

void exterior_derivative_serial(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::exterior_derivative(A));
}

void wedge_openmp(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  MatrixFormField B = connection_form(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(wedge(A, B));
}

void wedge_serial(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  MatrixFormField B = connection_form(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(serial::wedge(A, B));
}

void trace_openmp(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  MatrixFormField F = curvature(A);
  for (auto _ : state) benchmark::DoNotOptimize(trace(F));
}

void trace_serial(benchmark::State& state) {
  MatrixFormField A = connection_form(static_cast<int>(state.range(0)), 5);
  MatrixFormField F = curvature(A);
  for (auto _ : state) benchmark::DoNotOptimize(serial::trace(F));
}

void integrate_top_openmp(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  FormField T = transgression(trsq(), connection_form(n, 5),
                              connection_form(n, 6));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_top(T));
}

void integrate_top_serial(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  FormField T = transgression(trsq(), connection_form(n, 5),
                              connection_form(n, 6));
  for (auto _ : state) benchmark::DoNotOptimize(serial::integrate_top(T));
}

}  // namespace

BENCHMARK(partial_derivative_openmp)->Arg(16)->Arg(32);
BENCHMARK(partial_derivative_serial)->Arg(16)->Arg(32);
BENCHMARK(exterior_derivative_openmp)->Arg(16)->Arg(32);
BENCHMARK(exterior_derivative_serial)->Arg(16)->Arg(32);
BENCHMARK(wedge_openmp)->Arg(16)->Arg(32);
BENCHMARK(wedge_serial)->Arg(16)->Arg(32);
BENCHMARK(trace_openmp)->Arg(16)->Arg(32);
BENCHMARK(trace_serial)->Arg(16)->Arg(32);
BENCHMARK(integrate_top_openmp)->Arg(16)->Arg(32);
BENCHMARK(integrate_top_serial)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
