#include "vactrap/kernels.hpp"

#include <cstddef>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace vactrap::kernels {

namespace {

inline void apply_at(const Mat3& m, cplx& a, cplx& b, cplx& c)
{
    const cplx x = a, y = b, z = c;
    a = m[0] * x + m[1] * y + m[2] * z;
    b = m[3] * x + m[4] * y + m[5] * z;
    c = m[6] * x + m[7] * y + m[8] * z;
}

} // namespace

void flush_denormals_this_thread()
{
#if defined(__SSE2__)
    _mm_setcsr(_mm_getcsr() | 0x8040); // FTZ | DAZ
#endif
}

namespace serial {

void apply_pointwise(std::span<const Mat3> ops, WaveState& s)
{
    auto a = s.g0(), b = s.e0(), c = s.g1();
    for (std::size_t j = 0; j < ops.size(); ++j) apply_at(ops[j], a[j], b[j], c[j]);
}

void apply_phase(std::span<const cplx> factors, WaveState& s)
{
    for (Channel ch : all_channels) {
        auto v = s.channel(ch);
        for (std::size_t j = 0; j < factors.size(); ++j) v[j] *= factors[j];
    }
}

void apply_mask(std::span<const double> mask, WaveState& s)
{
    for (Channel ch : all_channels) {
        auto v = s.channel(ch);
        for (std::size_t j = 0; j < mask.size(); ++j) v[j] *= mask[j];
    }
}

std::array<double, 3> channel_sums(const WaveState& s)
{
    std::array<double, 3> out{};
    for (Channel ch : all_channels) {
        double acc = 0;
        for (const cplx& v : s.channel(ch)) acc += std::norm(v);
        out[static_cast<int>(ch)] = acc;
    }
    return out;
}

double weighted_sum(std::span<const double> weights, const WaveState& s)
{
    auto a = s.g0(), b = s.e0(), c = s.g1();
    double acc = 0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        acc += weights[j] * (std::norm(a[j]) + std::norm(b[j]) + std::norm(c[j]));
    return acc;
}

} // namespace serial

namespace omp {

void apply_pointwise(std::span<const Mat3> ops, WaveState& s)
{
    auto a = s.g0(), b = s.e0(), c = s.g1();
    const auto n = static_cast<std::ptrdiff_t>(ops.size());
#pragma omp parallel
    {
        flush_denormals_this_thread();
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) apply_at(ops[j], a[j], b[j], c[j]);
    }
}

void apply_phase(std::span<const cplx> factors, WaveState& s)
{
    const auto n = static_cast<std::ptrdiff_t>(factors.size());
    cplx* d = s.data().data();
#pragma omp parallel
    {
        flush_denormals_this_thread();
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const cplx f = factors[j];
            d[j] *= f;
            d[n + j] *= f;
            d[2 * n + j] *= f;
        }
    }
}

void apply_mask(std::span<const double> mask, WaveState& s)
{
    const auto n = static_cast<std::ptrdiff_t>(mask.size());
    cplx* d = s.data().data();
#pragma omp parallel
    {
        flush_denormals_this_thread();
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const double m = mask[j];
            d[j] *= m;
            d[n + j] *= m;
            d[2 * n + j] *= m;
        }
    }
}

// Reductions sum over a fixed partition of the grid, so the result does not
// depend on the number of threads.
constexpr std::ptrdiff_t reduction_blocks = 64;

std::array<double, 3> channel_sums(const WaveState& s)
{
    auto a = s.g0(), b = s.e0(), c = s.g1();
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    std::array<std::array<double, 3>, reduction_blocks> partial{};
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < reduction_blocks; ++blk) {
        const std::ptrdiff_t lo = n * blk / reduction_blocks;
        const std::ptrdiff_t hi = n * (blk + 1) / reduction_blocks;
        double sa = 0, sb = 0, sc = 0;
        for (std::ptrdiff_t j = lo; j < hi; ++j) {
            sa += std::norm(a[j]);
            sb += std::norm(b[j]);
            sc += std::norm(c[j]);
        }
        partial[blk] = {sa, sb, sc};
    }
    std::array<double, 3> out{};
    for (const auto& p : partial)
        for (int k = 0; k < 3; ++k) out[k] += p[k];
    return out;
}

double weighted_sum(std::span<const double> weights, const WaveState& s)
{
    auto a = s.g0(), b = s.e0(), c = s.g1();
    const auto n = static_cast<std::ptrdiff_t>(weights.size());
    std::array<double, reduction_blocks> partial{};
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < reduction_blocks; ++blk) {
        const std::ptrdiff_t lo = n * blk / reduction_blocks;
        const std::ptrdiff_t hi = n * (blk + 1) / reduction_blocks;
        double acc = 0;
        for (std::ptrdiff_t j = lo; j < hi; ++j)
            acc += weights[j] * (std::norm(a[j]) + std::norm(b[j]) + std::norm(c[j]));
        partial[blk] = acc;
    }
    double acc = 0;
    for (double v : partial) acc += v;
    return acc;
}

} // namespace omp

} // namespace vactrap::kernels
