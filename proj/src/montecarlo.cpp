#include "vactrap/montecarlo.hpp"

#include "vactrap/csv.hpp"
#include "vactrap/errors.hpp"
#include "vactrap/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace vactrap {

std::string_view to_string(RecoilForm f)
{
    switch (f) {
    case RecoilForm::DipoleLinear: return "dipole_linear";
    case RecoilForm::DipoleCircular: return "dipole_circular";
    case RecoilForm::Uniform: return "uniform";
    }
    return "unknown";
}

RecoilForm recoil_form_from_string(std::string_view s)
{
    if (s == "dipole_linear" || s == "DipoleLinear") return RecoilForm::DipoleLinear;
    if (s == "dipole_circular" || s == "DipoleCircular") return RecoilForm::DipoleCircular;
    if (s == "uniform" || s == "Uniform") return RecoilForm::Uniform;
    throw ConfigError(fmt::format("unknown recoil distribution '{}'", s));
}

std::string_view to_string(JumpChannel c)
{
    return c == JumpChannel::Cavity ? "cavity" : "atom";
}

double RecoilDistribution::density(double u) const
{
    if (u < -1 || u > 1) return 0;
    switch (form) {
    case RecoilForm::DipoleLinear: return 0.75 * (1 - u * u);
    case RecoilForm::DipoleCircular: return 0.375 * (1 + u * u);
    case RecoilForm::Uniform: return 0.5;
    }
    return 0;
}

double RecoilDistribution::cdf(double u) const
{
    u = std::clamp(u, -1.0, 1.0);
    switch (form) {
    case RecoilForm::DipoleLinear: return 0.75 * (u - u * u * u / 3) + 0.5;
    case RecoilForm::DipoleCircular: return 0.375 * (u + u * u * u / 3) + 0.5;
    case RecoilForm::Uniform: return 0.5 * (u + 1);
    }
    return 0;
}

double RecoilDistribution::quantile(double q) const
{
    q = std::clamp(q, 0.0, 1.0);
    switch (form) {
    case RecoilForm::DipoleLinear: {
        // u^3 - 3u + (4q - 2) = 0, root in [-1, 1] via u = 2 cos(theta)
        const double theta = std::acos(std::clamp(1 - 2 * q, -1.0, 1.0)) / 3 +
                             4 * std::numbers::pi / 3;
        return std::clamp(2 * std::cos(theta), -1.0, 1.0);
    }
    case RecoilForm::DipoleCircular: {
        // u^3 + 3u = 8q - 4, single real root (Cardano)
        const double h = (8 * q - 4) / 2;
        const double r = std::sqrt(h * h + 1);
        return std::clamp(std::cbrt(h + r) + std::cbrt(h - r), -1.0, 1.0);
    }
    case RecoilForm::Uniform: return 2 * q - 1;
    }
    return 0;
}

double sample_recoil(const RecoilDistribution& d, Rng& rng)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return d.quantile(uni(rng));
}

JumpProbabilities jump_probabilities(const WaveState& s, const PhysicalParams& p,
                                     const Grid& grid, double dt)
{
    const auto c = channel_norms_sq(s, grid);
    const double n2 = c[0] + c[1] + c[2];
    if (!(n2 > 0)) throw EmptyChannel("jump probabilities of an empty state");
    JumpProbabilities out;
    out.cavity = 2 * p.kappa * c[static_cast<int>(Channel::g1)] * dt / n2;
    out.atom = 2 * p.gamma * c[static_cast<int>(Channel::e0)] * dt / n2;
    if (out.total() >= max_jump_probability)
        throw StepTooLarge(fmt::format("jump probability {:.3g} per step is not below {}",
                                       out.total(), max_jump_probability));
    return out;
}

namespace {

WaveState transfer_to_ground(const WaveState& s, const Grid& grid, Channel source, double u)
{
    if (!(channel_norm_sq(s, grid, source) > 0))
        throw EmptyChannel("jump from an unpopulated channel");
    WaveState out(s.size());
    auto src = s.channel(source);
    auto dst = out.g0();
    for (std::size_t j = 0; j < grid.n; ++j)
        dst[j] = u == 0 ? src[j] : src[j] * std::polar(1.0, -u * grid.x[j]);
    normalize(out, grid);
    return out;
}

} // namespace

WaveState apply_cavity_jump(WaveState s, const Grid& grid)
{
    return transfer_to_ground(s, grid, Channel::g1, 0.0);
}

WaveState apply_atom_jump(WaveState s, const Grid& grid, double u)
{
    return transfer_to_ground(s, grid, Channel::e0, u);
}

std::size_t TrajectoryRecord::count(JumpChannel c) const
{
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [c](const JumpEvent& e) { return e.channel == c; }));
}

TrajectoryRecord run_trajectory(const Propagator& prop, const WaveState& init,
                                std::uint64_t seed, const TrajectoryOptions& opts)
{
    const Grid& grid = prop.grid();
    const PhysicalParams& p = prop.params();
    const double dt = prop.dt();
    if (prop.mode() != StepMode::RealEffective)
        throw Error("trajectories need an effective (non-Hermitian) propagator");
    if (!(opts.t_max > 0)) throw Error("trajectory needs t_max > 0");

    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // The ramp profile is applied as a rate: the full cos^2 factor is reached
    // over the time the fastest grid mode needs to cross the ramp. Applying it
    // once per step would make the ramp a reflecting wall for small dt.
    auto mask = opts.absorbing ? absorbing_mask(grid, opts.mask_fraction) : std::vector<double>{};
    if (!mask.empty()) {
        const double crossing = opts.mask_fraction * grid.half_extent
                              / (2 * p.recoil_energy * grid.p_max());
        const double power = std::min(1.0, dt / crossing);
        for (double& m : mask) m = std::pow(m, power);
    }
    std::vector<double> inside_weights(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
        inside_weights[j] = std::abs(grid.x[j]) < p.cavity_width ? 1.0 : 0.0;

    TrajectoryRecord rec;
    rec.seed = seed;
    WaveState s = init;
    normalize(s, grid);
    double absorbed = 0;
    double stop = opts.t_max;
    const std::size_t every = std::max<std::size_t>(opts.sample_every, 1);

    auto take_sample = [&](double t) {
        TrajectorySample smp;
        smp.t = t;
        const auto c = kernels::omp::channel_sums(s);
        const double total = c[0] + c[1] + c[2];
        for (int k = 0; k < 3; ++k) smp.populations[k] = c[k] / total;
        smp.inside = (1 - absorbed) * kernels::omp::weighted_sum(inside_weights, s) / total;
        smp.kinetic = kinetic_energy(s, prop.transform(), grid, p.recoil_energy);
        smp.absorbed = absorbed;
        if (!rec.trap_time && smp.inside <= opts.escape_threshold) {
            double t_esc = t;
            if (!rec.samples.empty()) {
                const auto& prev = rec.samples.back();
                const double span = prev.inside - smp.inside;
                if (span > 0) t_esc = prev.t + (prev.inside - opts.escape_threshold) / span * (t - prev.t);
            }
            rec.trap_time = t_esc;
            stop = std::min(opts.t_max, t_esc + opts.overshoot);
        }
        rec.samples.push_back(smp);
    };

    const auto max_steps = static_cast<std::size_t>(std::llround(opts.t_max / dt));
    std::size_t i = 0;
    for (;; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (i % every == 0) take_sample(t);
        if (i >= max_steps || t >= stop) {
            if (i % every != 0) take_sample(t);
            rec.t_end = t;
            break;
        }

        const auto probs = jump_probabilities(s, p, grid, dt);
        const double r = uni(rng);
        if (r < probs.total()) {
            JumpEvent ev;
            ev.t = t + dt;
            if (r < probs.cavity) {
                ev.channel = JumpChannel::Cavity;
                s = apply_cavity_jump(std::move(s), grid);
            } else {
                ev.channel = JumpChannel::Atom;
                ev.u = sample_recoil(opts.recoil, rng);
                if (opts.record_jump_energies) {
                    WaveState src(grid.n);
                    std::copy(s.e0().begin(), s.e0().end(), src.g0().begin());
                    ev.source_kinetic = kinetic_energy(src, prop.transform(), grid, p.recoil_energy);
                    ev.source_momentum = mean_momentum(src, prop.transform(), grid);
                }
                s = apply_atom_jump(std::move(s), grid, ev.u);
            }
            if (opts.record_jump_energies)
                ev.kinetic_after = kinetic_energy(s, prop.transform(), grid, p.recoil_energy);
            rec.events.push_back(ev);
        } else {
            prop.step(s);
            normalize(s, grid);
        }

        if (!mask.empty()) {
            kernels::omp::apply_mask(mask, s);
            const double kept = normalize(s, grid);
            absorbed += (1 - absorbed) * (1 - kept);
        }
    }
    return rec;
}

TrajectoryRecord run_trajectory(const PhysicalParams& p, const Grid& grid, const WaveState& init,
                                std::uint64_t seed, const TrajectoryOptions& opts)
{
    const double dt = opts.dt > 0 ? opts.dt : 0.5 * max_time_step(p, grid);
    const Propagator prop(p, grid, dt, StepMode::RealEffective);
    return run_trajectory(prop, init, seed, opts);
}

EnsembleStats summarize(const std::vector<std::optional<double>>& trap_times)
{
    EnsembleStats st;
    st.trap_times = trap_times;
    std::vector<double> escaped;
    for (const auto& t : trap_times) {
        if (t) escaped.push_back(*t);
        else ++st.n_censored;
    }
    st.n_escaped = escaped.size();
    std::sort(escaped.begin(), escaped.end());
    const std::size_t n = trap_times.size();
    auto quantile = [&](double q) -> std::optional<double> {
        if (n == 0) return std::nullopt;
        const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        const std::size_t idx = std::max<std::size_t>(k, 1) - 1;
        if (idx >= escaped.size()) return std::nullopt;
        return escaped[idx];
    };
    st.median = quantile(0.5);
    st.lower_quartile = quantile(0.25);
    st.upper_quartile = quantile(0.75);
    if (!escaped.empty()) {
        double sum = 0;
        for (double v : escaped) sum += v;
        st.mean = sum / static_cast<double>(escaped.size());
    }
    return st;
}

EnsembleResult run_ensemble(const PhysicalParams& p, const Grid& grid, const WaveState& init,
                            std::size_t n, std::uint64_t base_seed, const TrajectoryOptions& opts)
{
    if (n == 0) throw Error("ensemble needs at least one trajectory");
    const double dt = opts.dt > 0 ? opts.dt : 0.5 * max_time_step(p, grid);
    const Propagator prop(p, grid, dt, StepMode::RealEffective);

    EnsembleResult out;
    out.records.resize(n);
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        kernels::flush_denormals_this_thread();
        try {
            out.records[static_cast<std::size_t>(i)] =
                run_trajectory(prop, init, base_seed + static_cast<std::uint64_t>(i), opts);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::optional<double>> times;
    times.reserve(n);
    for (const auto& r : out.records) times.push_back(r.trap_time);
    out.stats = summarize(times);
    return out;
}

WaveState kicked_initial_state(const WaveState& ground, const Grid& grid, double u)
{
    return apply_momentum_kick(ground, grid, u, ChannelSet::all());
}

void write_event_csv(std::ostream& os, const TrajectoryRecord& r)
{
    csv::header(os, {"t", "channel", "u"});
    for (const auto& e : r.events) csv::row(os, e.t, to_string(e.channel), e.u);
}

void write_ensemble_csv(std::ostream& os, const EnsembleResult& e)
{
    csv::header(os, {"seed", "trap_time", "n_events", "censored"});
    for (const auto& r : e.records)
        csv::row(os, r.seed, r.trap_time ? csv::number(*r.trap_time) : std::string("nan"),
                 r.events.size(), r.trap_time ? 0 : 1);
}

} // namespace vactrap
