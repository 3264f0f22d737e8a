#include "vactrap/evolution.hpp"
#include "vactrap/grid.hpp"
#include "vactrap/kernels.hpp"
#include "vactrap/params.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace vactrap;
namespace k = vactrap::kernels;

namespace {

struct Inputs {
    WaveState state;
    std::vector<k::Mat3> ops;
    std::vector<cplx> phases;
    std::vector<double> weights;

    explicit Inputs(std::size_t n) : state(n), ops(n), phases(n), weights(n)
    {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> nd;
        for (auto& v : state.data()) v = {nd(rng), nd(rng)};
        // unitary-ish magnitudes keep repeated application finite
        for (auto& m : ops) {
            m = {};
            for (int i = 0; i < 3; ++i) m[4 * i] = std::polar(1.0, nd(rng));
        }
        for (auto& v : phases) v = std::polar(1.0, nd(rng));
        for (auto& v : weights) v = std::abs(nd(rng));
    }
};

template <auto Kernel>
void pointwise(benchmark::State& st)
{
    Inputs in(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        Kernel(in.ops, in.state);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Kernel>
void phase(benchmark::State& st)
{
    Inputs in(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        Kernel(in.phases, in.state);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Kernel>
void weighted(benchmark::State& st)
{
    Inputs in(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Kernel(in.weights, in.state));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Kernel>
void sums(benchmark::State& st)
{
    Inputs in(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Kernel(in.state));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void full_step(benchmark::State& st)
{
    const auto p = optical_preset();
    const auto g = make_grid(static_cast<std::size_t>(st.range(0)), 200);
    const Propagator prop(p, g, 0.5 * max_time_step(p, g), StepMode::RealEffective);
    auto s = gaussian_state(g, 0, 5, Channel::g0);
    for (auto _ : st) {
        prop.step(s);
        normalize(s, g);
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

#define SIZES RangeMultiplier(4)->Range(1 << 10, 1 << 16)

BENCHMARK(pointwise<k::serial::apply_pointwise>)->SIZES;
BENCHMARK(pointwise<k::omp::apply_pointwise>)->SIZES;
BENCHMARK(phase<k::serial::apply_phase>)->SIZES;
BENCHMARK(phase<k::omp::apply_phase>)->SIZES;
BENCHMARK(weighted<k::serial::weighted_sum>)->SIZES;
BENCHMARK(weighted<k::omp::weighted_sum>)->SIZES;
BENCHMARK(sums<k::serial::channel_sums>)->SIZES;
BENCHMARK(sums<k::omp::channel_sums>)->SIZES;
BENCHMARK(full_step)->SIZES;

BENCHMARK_MAIN();
