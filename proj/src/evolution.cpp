#include "vactrap/evolution.hpp"

#include "vactrap/analytic.hpp"
#include "vactrap/csv.hpp"
#include "vactrap/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace vactrap {

namespace {

using namespace std::complex_literals;

kernels::Mat3 to_mat3(const Eigen::Matrix3cd& m)
{
    kernels::Mat3 out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(3 * r + c)] = m(r, c);
    return out;
}

// Lowest eigenvalue of the Hermitian subspace block over all grid points.
double lowest_internal_energy(const PhysicalParams& p, const Grid& grid)
{
    double lo = std::numeric_limits<double>::infinity();
    for (double x : grid.x) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(build_subspace_matrix(p, x, false),
                                                           Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
    }
    return lo;
}

} // namespace

SubspaceMatrix build_subspace_matrix(const PhysicalParams& p, double x, bool effective)
{
    const double g = coupling_at(p, x);
    SubspaceMatrix h = SubspaceMatrix::Zero();
    h(0, 0) = p.delta / 2;
    h(1, 1) = -p.delta / 2;
    h(2, 2) = -p.delta / 2;
    h(0, 1) = h(1, 0) = p.omega / 2;
    h(1, 2) = h(2, 1) = g;
    if (effective) {
        h(1, 1) -= 1i * p.gamma;
        h(2, 2) -= 1i * p.kappa;
    }
    return h;
}

double step_energy_bound(const PhysicalParams& p, const Grid& grid)
{
    const double kinetic = p.recoil_energy * grid.p_max() * grid.p_max();
    double gmin = p.g0, gmax = 0;
    for (double x : grid.x) {
        const double g = coupling_at(p, x);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    const double a = analytic::exact_subspace_spectrum_at_coupling(p, gmin)[0].value;
    const double b = analytic::exact_subspace_spectrum_at_coupling(p, gmax)[0].value;
    return kinetic + std::abs(a - b);
}

double max_time_step(const PhysicalParams& p, const Grid& grid)
{
    return max_step_phase / step_energy_bound(p, grid);
}

Propagator::Propagator(const PhysicalParams& p, const Grid& grid, double dt, StepMode mode)
    : params_(p), grid_(grid), dt_(dt), mode_(mode), shift_(p.delta / 2), fft_(grid.n)
{
    if (!(dt > 0)) throw StepTooLarge(fmt::format("time step {} must be positive", dt));
    kernels::flush_denormals_this_thread();
    const double bound = step_energy_bound(p, grid);
    // relative slack so that dt = max_time_step() survives rounding
    if (dt * bound > max_step_phase * (1 + 1e-12))
        throw StepTooLarge(fmt::format("dt * E_max = {:.3g} exceeds {} (dt = {:.3g} s, "
                                       "E_max = {:.3g} rad/s)",
                                       dt * bound, max_step_phase, dt, bound));

    const bool imaginary = mode == StepMode::Imaginary;
    // In imaginary time every exponent is made non-positive so nothing
    // overflows; the constant drops out on renormalisation.
    if (imaginary) shift_ = lowest_internal_energy(p, grid);

    const bool effective = mode == StepMode::RealEffective;
    const cplx factor = imaginary ? cplx(-dt / 2, 0) : cplx(0, -dt / 2);
    half_internal_.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        SubspaceMatrix a = build_subspace_matrix(p, grid.x[j], effective);
        a.diagonal().array() -= shift_;
        const Eigen::Matrix3cd u = (factor * a).exp();
        half_internal_[j] = to_mat3(u);
    }

    kinetic_.resize(grid.n);
    const double inv_n = 1.0 / static_cast<double>(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double e = p.recoil_energy * grid.p[j] * grid.p[j];
        kinetic_[j] = (imaginary ? cplx(std::exp(-e * dt), 0) : std::polar(1.0, -e * dt)) * inv_n;
    }
}

void Propagator::step(WaveState& s) const
{
    kernels::omp::apply_pointwise(half_internal_, s);
    fft_.forward(s);
    kernels::omp::apply_phase(kinetic_, s);
    fft_.inverse(s, false);
    kernels::omp::apply_pointwise(half_internal_, s);
    if (mode_ == StepMode::Imaginary) normalize(s, grid_);
}

void Propagator::advance(WaveState& s, std::size_t steps) const
{
    for (std::size_t i = 0; i < steps; ++i) step(s);
}

WaveState step(WaveState s, const PhysicalParams& p, const Grid& grid, double dt, StepMode mode)
{
    Propagator(p, grid, dt, mode).step(s);
    return s;
}

double energy(const WaveState& s, const PhysicalParams& p, const Grid& grid,
              const SpectralTransform& fft)
{
    const double n2 = norm_sq(s, grid);
    if (!(n2 > 0)) throw EmptyChannel("energy of an empty state");
    const double kin = kinetic_energy(s, fft, grid, p.recoil_energy);

    double pot = 0;
    auto a = s.g0(), b = s.e0(), c = s.g1();
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double g = coupling_at(p, grid.x[j]);
        const double diag = p.delta / 2 * (std::norm(a[j]) - std::norm(b[j]) - std::norm(c[j]));
        const double laser = p.omega * std::real(std::conj(a[j]) * b[j]);
        const double cav = 2 * g * std::real(std::conj(b[j]) * c[j]);
        pot += diag + laser + cav;
    }
    return kin + pot * grid.dx / n2;
}

namespace {

struct ResolvedGroundOptions {
    double dt;
    double tol;
    double seed_width;
};

ResolvedGroundOptions resolve(const PhysicalParams& p, const Grid& grid,
                              const GroundStateOptions& opts)
{
    ResolvedGroundOptions r{};
    r.dt = opts.dt > 0 ? opts.dt : max_time_step(p, grid);
    if (opts.tol > 0) {
        r.tol = opts.tol;
    } else {
        double v0 = 0;
        try {
            v0 = analytic::potential_depth_exact(p);
        } catch (const DegenerateDenominator&) {
        }
        r.tol = 1e-4 * (v0 > 0 ? v0 : p.recoil_energy);
    }
    r.seed_width = opts.seed_width > 0 ? opts.seed_width : p.cavity_width / 4;
    return r;
}

template <class StepFn, class EnergyFn>
GroundStateResult relax(WaveState s, const ResolvedGroundOptions& r,
                        const GroundStateOptions& opts, StepFn&& step_fn, EnergyFn&& energy_fn)
{
    const std::size_t every = std::max<std::size_t>(opts.check_every, 1);
    double previous = energy_fn(s);
    std::size_t steps = 0;
    while (steps < opts.max_steps) {
        for (std::size_t i = 0; i < every; ++i) step_fn(s);
        steps += every;
        const double e = energy_fn(s);
        const double rate = std::abs(e - previous) / (static_cast<double>(every) * r.dt);
        previous = e;
        if (rate < r.tol) return {std::move(s), e, steps, static_cast<double>(steps) * r.dt};
    }
    throw NoConvergence(fmt::format("imaginary-time relaxation did not converge in {} steps "
                                    "(last energy {:.6g} rad/s)",
                                    steps, previous));
}

} // namespace

GroundStateResult ground_state(const PhysicalParams& p, const Grid& grid,
                               const GroundStateOptions& opts)
{
    const auto r = resolve(p, grid, opts);
    const Propagator prop(p, grid, r.dt, StepMode::Imaginary);
    WaveState seed = gaussian_state(grid, 0.0, r.seed_width, Channel::g0);
    return relax(
        std::move(seed), r, opts, [&](WaveState& s) { prop.step(s); },
        [&](const WaveState& s) { return energy(s, p, grid, prop.transform()); });
}

GroundStateResult adiabatic_ground_state(const PhysicalParams& p, const Grid& grid,
                                         const GroundStateOptions& opts)
{
    const auto r = resolve(p, grid, opts);
    if (r.dt * step_energy_bound(p, grid) > max_step_phase)
        throw StepTooLarge("imaginary time step too large for the adiabatic problem");

    std::vector<double> potential(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
        potential[j] = analytic::perturbative_levels(p, grid.x[j]).lambda0;
    const double lo = *std::min_element(potential.begin(), potential.end());

    std::vector<kernels::Mat3> half(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        half[j] = {};
        half[j][0] = std::exp(-(potential[j] - lo) * r.dt / 2);
    }
    std::vector<cplx> kinetic(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
        kinetic[j] = std::exp(-p.recoil_energy * grid.p[j] * grid.p[j] * r.dt) /
                     static_cast<double>(grid.n);

    const SpectralTransform fft(grid.n);
    auto step_fn = [&](WaveState& s) {
        kernels::omp::apply_pointwise(half, s);
        fft.forward(s);
        kernels::omp::apply_phase(kinetic, s);
        fft.inverse(s, false);
        kernels::omp::apply_pointwise(half, s);
        normalize(s, grid);
    };
    auto energy_fn = [&](const WaveState& s) {
        double pot = 0;
        for (std::size_t j = 0; j < grid.n; ++j) pot += potential[j] * std::norm(s.g0()[j]);
        return kinetic_energy(s, fft, grid, p.recoil_energy) + pot * grid.dx / norm_sq(s, grid);
    };
    return relax(gaussian_state(grid, 0.0, r.seed_width, Channel::g0), r, opts, step_fn,
                 energy_fn);
}

DecayResult no_jump_decay_time(const WaveState& s0, const PhysicalParams& p, const Grid& grid,
                               double dt, double t_max, std::size_t sample_every)
{
    const Propagator prop(p, grid, dt, StepMode::RealEffective);
    const double threshold = std::exp(-1.0);
    const std::size_t every = std::max<std::size_t>(sample_every, 1);

    WaveState s = s0;
    DecayResult out;
    auto sample = [&](double t, double n2) {
        DecaySample d;
        d.t = t;
        d.norm_sq = n2;
        const auto c = channel_norms_sq(s, grid);
        for (int k = 0; k < 3; ++k) d.populations[k] = c[k] / n2;
        d.mean_x = mean_position(s, grid);
        d.kinetic = kinetic_energy(s, prop.transform(), grid, p.recoil_energy);
        out.history.push_back(d);
    };

    double prev_norm = norm_sq(s, grid);
    sample(0.0, prev_norm);
    const auto max_steps = static_cast<std::size_t>(std::ceil(t_max / dt));
    for (std::size_t i = 1; i <= max_steps; ++i) {
        prop.step(s);
        const double n2 = norm_sq(s, grid);
        const double t = static_cast<double>(i) * dt;
        if (i % every == 0) sample(t, n2);
        if (n2 <= threshold) {
            // exponential interpolation: exact for a single-rate decay within the step
            const double frac = std::log(prev_norm / threshold) / std::log(prev_norm / n2);
            out.decay_time = t - dt + frac * dt;
            if (i % every != 0) sample(t, n2);
            return out;
        }
        prev_norm = n2;
    }
    throw Timeout(fmt::format("no-jump probability still {:.4g} > 1/e at t_max = {:.4g} s",
                              prev_norm, t_max));
}

void write_history_csv(std::ostream& os, const std::vector<DecaySample>& history)
{
    csv::header(os, {"t", "norm2", "P_g0", "P_g1", "P_e0", "mean_x", "E_kin"});
    for (const auto& d : history)
        csv::row(os, d.t, d.norm_sq, d.populations[0], d.populations[2], d.populations[1],
                 d.mean_x, d.kinetic);
}

} // namespace vactrap
