#pragma once

#include "vactrap/grid.hpp"

#include <array>
#include <complex>
#include <span>

// Pointwise grid kernels used by the propagators. Each kernel has an OpenMP
// version (`omp`) used in production and a plain loop (`serial`) kept as the
// reference for tests and the benchmark.
namespace vactrap::kernels {

// Row-major 3x3 complex matrix acting on (g0, e0, g1) at one grid point.
using Mat3 = std::array<cplx, 9>;

// Sets flush-to-zero and denormals-are-zero for the calling thread. Wave
// function tails underflow into subnormals, which are orders of magnitude
// slower on x86. No-op on other architectures.
void flush_denormals_this_thread();

namespace serial {
void apply_pointwise(std::span<const Mat3> ops, WaveState& s);
void apply_phase(std::span<const cplx> factors, WaveState& s);
void apply_mask(std::span<const double> mask, WaveState& s);
std::array<double, 3> channel_sums(const WaveState& s);
double weighted_sum(std::span<const double> weights, const WaveState& s);
} // namespace serial

namespace omp {
void apply_pointwise(std::span<const Mat3> ops, WaveState& s);
void apply_phase(std::span<const cplx> factors, WaveState& s);
void apply_mask(std::span<const double> mask, WaveState& s);
std::array<double, 3> channel_sums(const WaveState& s);
double weighted_sum(std::span<const double> weights, const WaveState& s);
} // namespace omp

} // namespace vactrap::kernels
