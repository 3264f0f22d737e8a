#pragma once

#include "vactrap/analytic.hpp"
#include "vactrap/config.hpp"
#include "vactrap/evolution.hpp"
#include "vactrap/montecarlo.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vactrap {

struct RunManifest {
    std::string command;
    std::string version = VACTRAP_VERSION;
    std::map<std::string, std::string> config;
    std::vector<std::uint64_t> seeds;
    double wall_time = 0; // s
    std::vector<std::string> outputs;
};

void write_manifest(std::ostream& os, const RunManifest& m);

// Output sink shared by the subcommands: a directory for CSV files and a
// stream for the human-readable key = value report.
struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir = ".";
    std::ostream* report = nullptr;
    bool allow_long = false;
};

// Grid from the numerics section; throws ConfigError on invalid input.
Grid grid_from(const RunConfig& cfg);

// Throws ConfigError when validate() reports errors.
void require_valid(const PhysicalParams& p, bool trapping);

struct AnalyticReport {
    double v0_exact = 0;
    double v0_approx = 0;
    double gamma_eff = 0;
    double tau_eff = 0;
    double lifetime_estimate = 0;
    double bound_state_margin = 0;
    double bound_length = 0;
    std::vector<Diagnostic> diagnostics;
};

AnalyticReport analytic_report(const RunConfig& cfg);

struct GroundReport {
    GroundStateResult result;
    double v0 = 0;
    double peak_ratio_g1 = 0; // |phi_g1(0)|^2 / |phi_g0(0)|^2
    double peak_ratio_e0 = 0;
    double peak_ratio_excited = 0; // (|phi_g1(0)|^2 + |phi_e0(0)|^2) / |phi_g0(0)|^2
    double half_radius = 0;   // 1/k, where the g0 density first drops to half its peak
    double inside = 0;
    bool trapped = true;      // false when V0 <= 0
};

GroundReport ground_report(const RunConfig& cfg, const Grid& grid);

enum class DecayInit { Ground, CavityPhoton };

DecayResult decay_run(const RunConfig& cfg, const Grid& grid, DecayInit init,
                      double center = 0.0);

// Kicked-ground-state ensemble with seeds seed, seed + 1, ...
EnsembleResult trap_run(const RunConfig& cfg, const Grid& grid, const WaveState& ground);

// Default horizons derived from tau_eff when the config leaves them at zero.
double resolved_decay_t_max(const RunConfig& cfg);
double resolved_trap_t_max(const RunConfig& cfg);

enum class SweepParam { Delta, Omega };
SweepParam sweep_param_from_string(std::string_view s);

struct SweepPoint {
    double value = 0; // rad/s
    RunConfig config;
};

// Evenly spaced values from..to (inclusive). Each bound is a frequency with
// unit, or a multiple of g0 written "<x> g0".
std::vector<SweepPoint> sweep_points(const RunConfig& base, SweepParam param, std::string_view from,
                                     std::string_view to, std::size_t points);

struct TrapSweepRow {
    double value = 0;
    double v0 = 0;
    double tau_eff = 0;
    EnsembleStats stats;
};

// One ensemble per point with common seeds and a common horizon: the
// longest default horizon of the points unless numerics.t_max is set.
std::vector<TrapSweepRow> trap_sweep(const std::vector<SweepPoint>& points, const Grid& grid);

RunManifest cmd_analytic(const CommandContext& ctx);
RunManifest cmd_optimize(const CommandContext& ctx);
RunManifest cmd_ground(const CommandContext& ctx);
RunManifest cmd_decay(const CommandContext& ctx, DecayInit init, double center = 0.0);
RunManifest cmd_trap(const CommandContext& ctx);

enum class SweepKind { Analytic, Trap };
RunManifest cmd_sweep(const CommandContext& ctx, SweepKind kind, SweepParam param,
                      std::string_view from, std::string_view to, std::size_t points);

} // namespace vactrap
