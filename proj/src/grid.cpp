#include "vactrap/grid.hpp"

#include "vactrap/csv.hpp"
#include "vactrap/errors.hpp"
#include "vactrap/kernels.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

namespace vactrap {

double Grid::p_max() const { return std::numbers::pi / dx; }

Grid make_grid(std::size_t n, double half_extent)
{
    if (n < 64 || !std::has_single_bit(n))
        throw InvalidGrid(fmt::format("grid size {} is not a power of two >= 64", n));
    if (!(half_extent > 0))
        throw InvalidGrid(fmt::format("half extent {} must be positive", half_extent));

    Grid g;
    g.n = n;
    g.half_extent = half_extent;
    g.dx = 2 * half_extent / static_cast<double>(n);
    g.x.resize(n);
    g.p.resize(n);
    const double dp = 2 * std::numbers::pi / (static_cast<double>(n) * g.dx);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        g.x[j] = -half_extent + static_cast<double>(j) * g.dx;
        g.p[j] = dp * static_cast<double>(sj < half ? sj : sj - static_cast<std::ptrdiff_t>(n));
    }
    return g;
}

std::vector<Diagnostic> validate_grid(const Grid& grid, double cavity_width)
{
    std::vector<Diagnostic> out;
    if (grid.dx > max_recoil_dx)
        out.push_back({Severity::Error, "grid_spacing",
                       fmt::format("dx = {:.4g} > {} does not resolve unit recoil phases", grid.dx,
                                   max_recoil_dx)});
    if (grid.half_extent < 2 * cavity_width)
        out.push_back({Severity::Warn, "grid_extent",
                       fmt::format("half extent {:.4g} is below two cavity widths ({:.4g})",
                                   grid.half_extent, 2 * cavity_width)});
    return out;
}

bool ChannelSet::contains(Channel c) const
{
    switch (c) {
    case Channel::g0: return g0;
    case Channel::e0: return e0;
    case Channel::g1: return g1;
    }
    return false;
}

ChannelSet ChannelSet::only(Channel c)
{
    return {c == Channel::g0, c == Channel::e0, c == Channel::g1};
}

WaveState::WaveState(std::size_t n) : n_(n), data_(3 * n, cplx{0, 0}) {}

std::span<cplx> WaveState::channel(Channel c)
{
    return std::span<cplx>(data_).subspan(static_cast<std::size_t>(c) * n_, n_);
}

std::span<const cplx> WaveState::channel(Channel c) const
{
    return std::span<const cplx>(data_).subspan(static_cast<std::size_t>(c) * n_, n_);
}

void WaveState::scale(double f)
{
    for (auto& v : data_) v *= f;
}

WaveState gaussian_state(const Grid& grid, double center, double width, Channel channel,
                         double momentum)
{
    WaveState s(grid.n);
    auto v = s.channel(channel);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double d = grid.x[j] - center;
        v[j] = std::exp(-d * d / (4 * width * width)) * std::polar(1.0, momentum * grid.x[j]);
    }
    normalize(s, grid);
    return s;
}

// FFTW's planner is not re-entrant; plans are created under this lock.
static std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct SpectralTransform::Plans {
    std::size_t n = 0;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

SpectralTransform::SpectralTransform(std::size_t n) : plans_(std::make_unique<Plans>())
{
    plans_->n = n;
    ComplexBuffer scratch(3 * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int len = static_cast<int>(n);
    // FFTW_ESTIMATE keeps the chosen algorithm, and so the rounding, identical
    // from run to run.
    std::lock_guard lock(planner_mutex());
    plans_->fwd = fftw_plan_many_dft(1, &len, 3, buf, nullptr, 1, len, buf, nullptr, 1, len,
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_many_dft(1, &len, 3, buf, nullptr, 1, len, buf, nullptr, 1, len,
                                     FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->fwd || !plans_->bwd) throw Error("FFTW planning failed");
}

SpectralTransform::~SpectralTransform()
{
    if (!plans_) return;
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

std::size_t SpectralTransform::size() const { return plans_->n; }

void SpectralTransform::forward(WaveState& s) const
{
    auto* buf = reinterpret_cast<fftw_complex*>(s.data().data());
    fftw_execute_dft(plans_->fwd, buf, buf);
}

void SpectralTransform::inverse(WaveState& s, bool normalize) const
{
    auto* buf = reinterpret_cast<fftw_complex*>(s.data().data());
    fftw_execute_dft(plans_->bwd, buf, buf);
    if (normalize) s.scale(1.0 / static_cast<double>(plans_->n));
}

std::array<double, 3> channel_norms_sq(const WaveState& s, const Grid& grid)
{
    auto sums = kernels::omp::channel_sums(s);
    for (auto& v : sums) v *= grid.dx;
    return sums;
}

double channel_norm_sq(const WaveState& s, const Grid& grid, Channel c)
{
    return channel_norms_sq(s, grid)[static_cast<int>(c)];
}

double norm_sq(const WaveState& s, const Grid& grid)
{
    const auto c = channel_norms_sq(s, grid);
    return c[0] + c[1] + c[2];
}

double normalize(WaveState& s, const Grid& grid)
{
    const double n2 = norm_sq(s, grid);
    if (n2 > 0) s.scale(1 / std::sqrt(n2));
    return n2;
}

double inside_probability(const WaveState& s, const Grid& grid, double sigma)
{
    std::vector<double> w(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) w[j] = std::abs(grid.x[j]) < sigma ? 1.0 : 0.0;
    const double total = kernels::omp::weighted_sum(std::vector<double>(grid.n, 1.0), s);
    if (total == 0) return 0;
    return kernels::omp::weighted_sum(w, s) / total;
}

WaveState apply_momentum_kick(WaveState s, const Grid& grid, double u, ChannelSet channels)
{
    if (u == 0) return s;
    for (Channel c : all_channels) {
        if (!channels.contains(c)) continue;
        auto v = s.channel(c);
        for (std::size_t j = 0; j < grid.n; ++j) v[j] *= std::polar(1.0, -u * grid.x[j]);
    }
    return s;
}

double mean_position(const WaveState& s, const Grid& grid)
{
    const double total = kernels::omp::weighted_sum(std::vector<double>(grid.n, 1.0), s);
    return kernels::omp::weighted_sum(grid.x, s) / total;
}

namespace {

double momentum_moment(const WaveState& s, const SpectralTransform& fft, const Grid& grid,
                       int power)
{
    WaveState k = s;
    fft.forward(k);
    std::vector<double> w(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) w[j] = std::pow(grid.p[j], power);
    const double total = kernels::omp::weighted_sum(std::vector<double>(grid.n, 1.0), k);
    return kernels::omp::weighted_sum(w, k) / total;
}

} // namespace

double mean_momentum(const WaveState& s, const SpectralTransform& fft, const Grid& grid)
{
    return momentum_moment(s, fft, grid, 1);
}

double mean_momentum_sq(const WaveState& s, const SpectralTransform& fft, const Grid& grid)
{
    return momentum_moment(s, fft, grid, 2);
}

double kinetic_energy(const WaveState& s, const SpectralTransform& fft, const Grid& grid,
                      double recoil_energy)
{
    return recoil_energy * mean_momentum_sq(s, fft, grid);
}

std::vector<double> absorbing_mask(const Grid& grid, double fraction)
{
    std::vector<double> m(grid.n, 1.0);
    const double width = fraction * grid.half_extent;
    if (width <= 0) return m;
    const double start = grid.half_extent - width;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double d = std::abs(grid.x[j]) - start;
        if (d > 0) {
            const double c = std::cos(0.5 * std::numbers::pi * std::min(d / width, 1.0));
            m[j] = c * c;
        }
    }
    return m;
}

void write_density_csv(std::ostream& os, const WaveState& s, const Grid& grid)
{
    csv::header(os, {"x", "rho_g0", "rho_g1", "rho_e0"});
    for (std::size_t j = 0; j < grid.n; ++j)
        csv::row(os, grid.x[j], std::norm(s.g0()[j]), std::norm(s.g1()[j]),
                 std::norm(s.e0()[j]));
}

} // namespace vactrap
