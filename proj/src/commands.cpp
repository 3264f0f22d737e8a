#include "vactrap/commands.hpp"

#include "vactrap/csv.hpp"
#include "vactrap/errors.hpp"
#include "vactrap/units.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace vactrap {

namespace {

using Clock = std::chrono::steady_clock;

// Physical horizon above which trapping runs need an explicit opt-in.
constexpr double long_run_threshold = 1.0; // s

std::ostream& report(const CommandContext& ctx) { return ctx.report ? *ctx.report : std::cout; }

template <class... Args>
void line(const CommandContext& ctx, fmt::format_string<Args...> f, Args&&... args)
{
    report(ctx) << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

class OutputFile {
public:
    OutputFile(const CommandContext& ctx, RunManifest& m, const std::string& name)
        : path_(ctx.out_dir / name), stream_(path_)
    {
        if (!stream_) throw ConfigError(fmt::format("cannot write '{}'", path_.string()));
        m.outputs.push_back(path_.string());
    }
    std::ostream& operator*() { return stream_; }

private:
    std::filesystem::path path_;
    std::ofstream stream_;
};

RunManifest start_manifest(const CommandContext& ctx, std::string command)
{
    std::filesystem::create_directories(ctx.out_dir);
    RunManifest m;
    m.command = std::move(command);
    m.config = config_entries(ctx.config);
    return m;
}

void finish(RunManifest& m, Clock::time_point start)
{
    m.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
}

void print_diagnostics(const CommandContext& ctx, const std::vector<Diagnostic>& diags)
{
    for (const auto& d : diags)
        line(ctx, "{} {}: {}", d.severity == Severity::Error ? "error" : "warning", d.code,
             d.message);
}

double depth_or_zero(const PhysicalParams& p)
{
    try {
        return analytic::potential_depth_exact(p);
    } catch (const DegenerateDenominator&) {
        return 0;
    }
}

double tau_eff_or_zero(const PhysicalParams& p)
{
    try {
        return analytic::tau_eff(p);
    } catch (const Error&) {
        return 0;
    }
}

GroundStateOptions ground_options(const RunConfig& cfg)
{
    GroundStateOptions o;
    o.dt = cfg.numerics.ground_dt;
    o.tol = cfg.numerics.ground_tol;
    return o;
}

TrajectoryOptions trajectory_options(const RunConfig& cfg)
{
    TrajectoryOptions o;
    o.dt = cfg.numerics.dt;
    o.t_max = resolved_trap_t_max(cfg);
    o.sample_every = cfg.numerics.sample_every;
    o.overshoot = cfg.numerics.overshoot;
    o.escape_threshold = cfg.numerics.escape_threshold;
    o.recoil.form = cfg.numerics.recoil;
    o.absorbing = cfg.numerics.absorbing;
    o.mask_fraction = cfg.numerics.mask_fraction;
    return o;
}

void require_short(const CommandContext& ctx, double t_max)
{
    if (t_max > long_run_threshold && !ctx.allow_long)
        throw ConfigError(fmt::format("trapping horizon {:.3g} s is a long run; pass --long to "
                                      "allow it or lower numerics.t_max",
                                      t_max));
}

double parse_sweep_bound(const PhysicalParams& p, std::string_view text)
{
    auto s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.substr(s.size() - 2) == "g0") {
        s.remove_suffix(2);
        return parse_frequency(s) * p.g0;
    }
    return parse_frequency(s);
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? csv::number(*v) : std::string("nan");
}

} // namespace

void write_manifest(std::ostream& os, const RunManifest& m)
{
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["config"] = m.config;
    j["seeds"] = m.seeds;
    j["wall_time_s"] = m.wall_time;
    j["outputs"] = m.outputs;
    os << j.dump(2) << '\n';
}

Grid grid_from(const RunConfig& cfg)
{
    try {
        Grid g = make_grid(cfg.numerics.grid_points, cfg.numerics.half_extent);
        for (const auto& d : validate_grid(g, cfg.params.cavity_width))
            if (d.severity == Severity::Error) throw ConfigError(d.message);
        return g;
    } catch (const InvalidGrid& e) {
        throw ConfigError(e.what());
    }
}

void require_valid(const PhysicalParams& p, bool trapping)
{
    for (const auto& d : validate(p, trapping))
        if (d.severity == Severity::Error)
            throw ConfigError(fmt::format("{}: {}", d.code, d.message));
}

AnalyticReport analytic_report(const RunConfig& cfg)
{
    const auto& p = cfg.params;
    AnalyticReport r;
    r.diagnostics = validate(p, false);
    r.v0_exact = analytic::potential_depth_exact(p);
    r.v0_approx = analytic::potential_depth_approx(p);
    r.gamma_eff = analytic::gamma_eff(p);
    r.tau_eff = r.gamma_eff > 0 ? 1 / r.gamma_eff : INFINITY;
    try {
        r.lifetime_estimate = analytic::lifetime_estimate(p);
    } catch (const DegenerateInput&) {
        r.lifetime_estimate = INFINITY;
    }
    r.bound_length = cfg.numerics.bound_length > 0 ? cfg.numerics.bound_length
                                                   : 10 * units::two_pi;
    r.bound_state_margin =
        r.v0_exact > 0 ? analytic::bound_state_margin(r.v0_exact, r.bound_length, p.recoil_energy)
                       : 0.0;
    return r;
}

GroundReport ground_report(const RunConfig& cfg, const Grid& grid)
{
    GroundReport r;
    r.v0 = depth_or_zero(cfg.params);
    r.trapped = r.v0 > 0;
    r.result = ground_state(cfg.params, grid, ground_options(cfg));

    const auto& s = r.result.state;
    const std::size_t c = grid.n / 2; // x = 0
    const double peak = std::norm(s.g0()[c]);
    r.peak_ratio_g1 = std::norm(s.g1()[c]) / peak;
    r.peak_ratio_e0 = std::norm(s.e0()[c]) / peak;
    r.peak_ratio_excited = r.peak_ratio_g1 + r.peak_ratio_e0;
    r.half_radius = grid.half_extent;
    for (std::size_t j = c + 1; j < grid.n; ++j) {
        const double d = std::norm(s.g0()[j]);
        if (d <= 0.5 * peak) {
            const double prev = std::norm(s.g0()[j - 1]);
            r.half_radius = grid.x[j - 1] + (prev - 0.5 * peak) / (prev - d) * grid.dx;
            break;
        }
    }
    r.inside = inside_probability(s, grid, cfg.params.cavity_width);
    return r;
}

double resolved_decay_t_max(const RunConfig& cfg)
{
    if (cfg.numerics.t_max > 0) return cfg.numerics.t_max;
    const double tau = tau_eff_or_zero(cfg.params);
    if (!(tau > 0)) throw ConfigError("no loss channel: set numerics.t_max explicitly");
    return 20 * tau;
}

double resolved_trap_t_max(const RunConfig& cfg)
{
    if (cfg.numerics.t_max > 0) return cfg.numerics.t_max;
    const double tau = tau_eff_or_zero(cfg.params);
    if (!(tau > 0)) throw ConfigError("no loss channel: set numerics.t_max explicitly");
    return 100 * tau;
}

DecayResult decay_run(const RunConfig& cfg, const Grid& grid, DecayInit init, double center)
{
    const auto& p = cfg.params;
    const double dt = cfg.numerics.dt > 0 ? cfg.numerics.dt : 0.5 * max_time_step(p, grid);
    const double t_max = resolved_decay_t_max(cfg);
    WaveState s0;
    if (init == DecayInit::Ground) {
        s0 = ground_state(p, grid, ground_options(cfg)).state;
    } else {
        s0 = gaussian_state(grid, center, p.cavity_width / 10, Channel::g1);
    }
    return no_jump_decay_time(s0, p, grid, dt, t_max, 100);
}

EnsembleResult trap_run(const RunConfig& cfg, const Grid& grid, const WaveState& ground)
{
    const auto init = kicked_initial_state(ground, grid, cfg.numerics.kick);
    return run_ensemble(cfg.params, grid, init, cfg.numerics.trajectories, cfg.numerics.seed,
                        trajectory_options(cfg));
}

SweepParam sweep_param_from_string(std::string_view s)
{
    if (s == "delta") return SweepParam::Delta;
    if (s == "omega") return SweepParam::Omega;
    throw ConfigError(fmt::format("unknown sweep parameter '{}' (delta or omega)", s));
}

std::vector<SweepPoint> sweep_points(const RunConfig& base, SweepParam param, std::string_view from,
                                     std::string_view to, std::size_t points)
{
    if (points == 0) throw ConfigError("a sweep needs at least one point");
    const double a = parse_sweep_bound(base.params, from);
    const double b = parse_sweep_bound(base.params, to);
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        SweepPoint pt;
        pt.value = a + f * (b - a);
        pt.config = base;
        (param == SweepParam::Delta ? pt.config.params.delta : pt.config.params.omega) = pt.value;
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<TrapSweepRow> trap_sweep(const std::vector<SweepPoint>& points, const Grid& grid)
{
    // One horizon for every point, so censored runs mean the same thing
    // across the sweep.
    double horizon = 0;
    for (const auto& pt : points) horizon = std::max(horizon, resolved_trap_t_max(pt.config));

    std::vector<TrapSweepRow> rows;
    for (const auto& pt : points) {
        auto cfg = pt.config;
        cfg.numerics.t_max = horizon;
        require_valid(cfg.params, true);
        const auto ground = ground_state(cfg.params, grid, ground_options(cfg));
        TrapSweepRow row;
        row.value = pt.value;
        row.v0 = depth_or_zero(cfg.params);
        row.tau_eff = tau_eff_or_zero(cfg.params);
        row.stats = trap_run(cfg, grid, ground.state).stats;
        rows.push_back(std::move(row));
    }
    return rows;
}

RunManifest cmd_analytic(const CommandContext& ctx)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, "analytic");
    const auto& p = ctx.config.params;
    const auto r = analytic_report(ctx.config);

    print_diagnostics(ctx, r.diagnostics);
    line(ctx, "v0_exact = {:.6e} rad/s", r.v0_exact);
    line(ctx, "v0_approx = {:.6e} rad/s", r.v0_approx);
    line(ctx, "gamma_eff = {:.6e} rad/s", r.gamma_eff);
    line(ctx, "tau_eff = {:.6e} s", r.tau_eff);
    line(ctx, "lifetime_estimate = {:.6e} s", r.lifetime_estimate);
    line(ctx, "bound_state_margin = {:.6e} (L = {:.6g}/k)", r.bound_state_margin, r.bound_length);

    OutputFile out(ctx, m, "analytic.csv");
    csv::header(*out, {"g0", "kappa", "gamma", "omega", "delta", "recoil_energy", "v0_exact",
                       "v0_approx", "gamma_eff", "tau_eff", "lifetime_estimate",
                       "bound_state_margin"});
    csv::row(*out, p.g0, p.kappa, p.gamma, p.omega, p.delta, p.recoil_energy, r.v0_exact,
             r.v0_approx, r.gamma_eff, r.tau_eff, r.lifetime_estimate, r.bound_state_margin);
    finish(m, start);
    return m;
}

RunManifest cmd_optimize(const CommandContext& ctx)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, "optimize");
    const auto& p = ctx.config.params;
    const double target =
        ctx.config.numerics.v0_target > 0 ? ctx.config.numerics.v0_target : depth_or_zero(p);
    if (!(target > 0)) throw ConfigError("set numerics.v0_target to a positive trap depth");

    const auto d = analytic::optimize_laser(p, target);
    line(ctx, "v0_target = {:.6e} rad/s", target);
    line(ctx, "delta = {:.6e} rad/s ({:.6f} g0, {:.6f} x 2pi MHz)", d.delta, d.delta / p.g0,
         units::to_two_pi_mhz(d.delta));
    line(ctx, "omega = {:.6e} rad/s ({:.6f} x 2pi MHz, {:.6f} x 2pi kHz)", d.omega,
         units::to_two_pi_mhz(d.omega), units::to_two_pi_khz(d.omega));
    line(ctx, "tau_eff = {:.6e} s", d.tau_eff);
    if (!d.feasible) line(ctx, "warning infeasible: Omega >= |Delta|, outside the weak-drive picture");

    // tau_eff along the constant-depth curve around the optimum.
    OutputFile out(ctx, m, "optimize.csv");
    csv::header(*out, {"delta", "omega", "tau_eff"});
    for (int i = -20; i <= 20; ++i) {
        const double delta = d.delta * (1 + 0.01 * i);
        if (!(-delta > p.g0 * (1 + analytic::degeneracy_epsilon))) continue;
        PhysicalParams q = p;
        q.delta = delta;
        q.omega = analytic::omega_for_depth(p, delta, target);
        csv::row(*out, delta, q.omega, analytic::tau_eff(q));
    }
    finish(m, start);
    return m;
}

RunManifest cmd_ground(const CommandContext& ctx)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, "ground");
    require_valid(ctx.config.params, true);
    const Grid grid = grid_from(ctx.config);
    const auto r = ground_report(ctx.config, grid);
    const double sigma = ctx.config.params.cavity_width;

    if (!r.trapped) line(ctx, "no laser trap: V0 = {:.3e} rad/s", r.v0);
    line(ctx, "energy = {:.9e} rad/s", r.result.energy);
    line(ctx, "imaginary_steps = {}", r.result.steps);
    line(ctx, "peak_ratio_g1 = {:.6e}", r.peak_ratio_g1);
    line(ctx, "peak_ratio_e0 = {:.6e}", r.peak_ratio_e0);
    line(ctx, "peak_ratio_excited = {:.6e}", r.peak_ratio_excited);
    line(ctx, "half_density_radius = {:.6e} /k ({:.6f} sigma)", r.half_radius, r.half_radius / sigma);
    line(ctx, "inside_probability = {:.9f}", r.inside);

    OutputFile out(ctx, m, "ground.csv");
    write_density_csv(*out, r.result.state, grid);
    finish(m, start);
    return m;
}

RunManifest cmd_decay(const CommandContext& ctx, DecayInit init, double center)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, "decay");
    require_valid(ctx.config.params, true);
    const Grid grid = grid_from(ctx.config);
    const auto r = decay_run(ctx.config, grid, init, center);

    line(ctx, "decay_time = {:.6e} s", r.decay_time);
    const double tau = tau_eff_or_zero(ctx.config.params);
    if (tau > 0) line(ctx, "tau_eff = {:.6e} s (ratio {:.4f})", tau, r.decay_time / tau);

    OutputFile out(ctx, m, "history.csv");
    write_history_csv(*out, r.history);
    finish(m, start);
    return m;
}

RunManifest cmd_trap(const CommandContext& ctx)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, "trap");
    const auto& cfg = ctx.config;
    require_valid(cfg.params, true);
    require_short(ctx, resolved_trap_t_max(cfg));
    const Grid grid = grid_from(cfg);

    const auto ground = ground_state(cfg.params, grid, ground_options(cfg));
    const auto e = trap_run(cfg, grid, ground.state);
    for (const auto& r : e.records) m.seeds.push_back(r.seed);

    line(ctx, "trajectories = {}", e.records.size());
    line(ctx, "escaped = {}", e.stats.n_escaped);
    line(ctx, "censored = {}", e.stats.n_censored);
    line(ctx, "median_trap_time = {} s", optional_number(e.stats.median));
    line(ctx, "lower_quartile = {} s", optional_number(e.stats.lower_quartile));
    line(ctx, "upper_quartile = {} s", optional_number(e.stats.upper_quartile));
    line(ctx, "mean_escaped = {} s", optional_number(e.stats.mean));

    {
        OutputFile out(ctx, m, "ensemble.csv");
        write_ensemble_csv(*out, e);
    }
    for (const auto& r : e.records) {
        OutputFile out(ctx, m, fmt::format("events_{}.csv", r.seed));
        write_event_csv(*out, r);
    }
    finish(m, start);
    return m;
}

RunManifest cmd_sweep(const CommandContext& ctx, SweepKind kind, SweepParam param,
                      std::string_view from, std::string_view to, std::size_t points)
{
    const auto start = Clock::now();
    auto m = start_manifest(ctx, kind == SweepKind::Analytic ? "sweep analytic" : "sweep trap");
    const auto pts = sweep_points(ctx.config, param, from, to, points);
    const auto name = param == SweepParam::Delta ? "delta" : "omega";

    if (kind == SweepKind::Analytic) {
        OutputFile out(ctx, m, fmt::format("sweep_{}.csv", name));
        csv::header(*out, {name, "v0_exact", "v0_approx", "gamma_eff", "tau_eff"});
        for (const auto& pt : pts) {
            const auto& p = pt.config.params;
            csv::row(*out, pt.value, analytic::potential_depth_exact(p),
                     analytic::potential_depth_approx(p), analytic::gamma_eff(p),
                     tau_eff_or_zero(p));
        }
        line(ctx, "points = {}", pts.size());
    } else {
        for (const auto& pt : pts) require_short(ctx, resolved_trap_t_max(pt.config));
        const Grid grid = grid_from(ctx.config);
        const auto rows = trap_sweep(pts, grid);
        for (std::size_t i = 0; i < ctx.config.numerics.trajectories; ++i)
            m.seeds.push_back(ctx.config.numerics.seed + i);

        OutputFile out(ctx, m, fmt::format("sweep_trap_{}.csv", name));
        csv::header(*out, {name, "v0", "tau_eff", "median", "lower_quartile", "upper_quartile",
                           "n_escaped", "n_censored"});
        OutputFile times(ctx, m, fmt::format("sweep_trap_{}_times.csv", name));
        csv::header(*times, {name, "seed", "trap_time", "censored"});
        for (const auto& r : rows) {
            csv::row(*out, r.value, r.v0, r.tau_eff, optional_number(r.stats.median),
                     optional_number(r.stats.lower_quartile),
                     optional_number(r.stats.upper_quartile), r.stats.n_escaped,
                     r.stats.n_censored);
            for (std::size_t i = 0; i < r.stats.trap_times.size(); ++i)
                csv::row(*times, r.value, ctx.config.numerics.seed + i,
                         optional_number(r.stats.trap_times[i]), r.stats.trap_times[i] ? 0 : 1);
            line(ctx, "{} = {:.6e}: median = {} s", name, r.value, optional_number(r.stats.median));
        }
    }
    finish(m, start);
    return m;
}

} // namespace vactrap
