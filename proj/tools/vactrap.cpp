#include "vactrap/commands.hpp"
#include "vactrap/config.hpp"
#include "vactrap/errors.hpp"
#include "vactrap/kernels.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

// Environment variable that fixes the OpenMP thread count.
constexpr const char* threads_env = "VACTRAP_THREADS";

void apply_thread_env()
{
    const char* v = std::getenv(threads_env);
    if (!v || !*v) return;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1)
        throw vactrap::ConfigError(fmt::format("{} must be a positive integer, got '{}'", threads_env, v));
    omp_set_num_threads(static_cast<int>(n));
}

struct Shortcut {
    const char* flag;
    const char* key;
    const char* help;
};

// Convenience flags; each maps onto one config key. --set reaches all keys.
constexpr Shortcut shortcuts[] = {
    {"--g0", "cavity.g0", "peak coupling, e.g. '16 2pi.MHz'"},
    {"--kappa", "cavity.kappa", "cavity decay rate"},
    {"--gamma", "atom.gamma", "atomic decay rate"},
    {"--recoil-energy", "atom.recoil_energy", "recoil energy E_R"},
    {"--width", "cavity.width", "cavity width sigma in 1/k"},
    {"--omega", "laser.omega", "laser Rabi frequency"},
    {"--delta", "laser.delta", "laser detuning (negative traps)"},
    {"--points", "numerics.points", "grid points (power of two)"},
    {"--half-extent", "numerics.half_extent", "grid half extent in 1/k"},
    {"--dt", "numerics.dt", "real-time step, e.g. '50 ns'"},
    {"--t-max", "numerics.t_max", "simulation horizon, e.g. '10 ms'"},
    {"--trajectories", "numerics.trajectories", "ensemble size"},
    {"--seed", "numerics.seed", "base seed"},
    {"--v0", "numerics.v0_target", "target trap depth for optimize"},
};

} // namespace

int main(int argc, char** argv)
{
    using namespace vactrap;
    kernels::flush_denormals_this_thread();

    CLI::App app{"Vacuum-field cavity trap: analytic design and quantum-jump simulation"};
    app.set_version_flag("--version", VACTRAP_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string preset;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    bool allow_long = false;
    app.add_option("-c,--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "start from a preset")
        ->check(CLI::IsMember({"optical", "microwave"}));
    app.add_option("--set", sets, "override a config key: section.key=value");
    app.add_option("-o,--out", out_dir, "output directory");
    app.add_flag("--long", allow_long, "allow trapping runs longer than 1 s of physical time");

    std::vector<std::optional<std::string>> shortcut_values(std::size(shortcuts));
    for (std::size_t i = 0; i < std::size(shortcuts); ++i)
        app.add_option(shortcuts[i].flag, shortcut_values[i], shortcuts[i].help);

    auto* analytic = app.add_subcommand("analytic", "trap depth, effective lifetime and estimates");
    auto* optimize = app.add_subcommand("optimize", "laser parameters maximising tau_eff at fixed depth");
    auto* ground = app.add_subcommand("ground", "imaginary-time ground state snapshot");

    auto* decay = app.add_subcommand("decay", "no-jump decay of the ground state");
    std::string decay_init = "ground";
    double center = 0;
    decay->add_option("--init", decay_init, "initial state")->check(CLI::IsMember({"ground", "g1"}));
    decay->add_option("--center", center, "centre of the |g,1> packet in 1/k");

    auto* trap = app.add_subcommand("trap", "trapping-time ensemble");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep of analytic or trapping results");
    std::string sweep_kind = "analytic", sweep_param = "delta", from, to;
    std::size_t points = 5;
    sweep->add_option("--kind", sweep_kind)->check(CLI::IsMember({"analytic", "trap"}));
    sweep->add_option("--param", sweep_param)->check(CLI::IsMember({"delta", "omega"}));
    sweep->add_option("--from", from, "start, e.g. '-3 g0' or '0.5 2pi.MHz'")->required();
    sweep->add_option("--to", to, "end")->required();
    sweep->add_option("--points", points, "number of points")->check(CLI::PositiveNumber);

    for (auto* sub : {analytic, optimize, ground, decay, trap, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        apply_thread_env();

        CommandContext ctx;
        ctx.out_dir = out_dir;
        ctx.allow_long = allow_long;
        if (!config_path.empty()) {
            ctx.config = read_config_file(config_path, preset);
        } else {
            const std::string name = preset.empty() ? "optical" : preset;
            ctx.config.preset = name;
            ctx.config.params = preset_by_name(name);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(fmt::format("--set '{}' must look like section.key=value", s));
            apply_override(ctx.config, s.substr(0, eq), s.substr(eq + 1));
        }
        for (std::size_t i = 0; i < std::size(shortcuts); ++i)
            if (shortcut_values[i]) apply_override(ctx.config, shortcuts[i].key, *shortcut_values[i]);

        RunManifest m;
        if (*analytic) m = cmd_analytic(ctx);
        else if (*optimize) m = cmd_optimize(ctx);
        else if (*ground) m = cmd_ground(ctx);
        else if (*decay)
            m = cmd_decay(ctx, decay_init == "g1" ? DecayInit::CavityPhoton : DecayInit::Ground, center);
        else if (*trap) m = cmd_trap(ctx);
        else
            m = cmd_sweep(ctx, sweep_kind == "trap" ? SweepKind::Trap : SweepKind::Analytic,
                          sweep_param_from_string(sweep_param), from, to, points);

        const auto cfg_path = std::filesystem::path(out_dir) / "config.ini";
        {
            std::ofstream os(cfg_path);
            write_config(os, ctx.config);
        }
        m.outputs.push_back(cfg_path.string());
        std::ofstream os(std::filesystem::path(out_dir) / "manifest.json");
        write_manifest(os, m);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
