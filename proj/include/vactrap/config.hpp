#pragma once

#include "vactrap/montecarlo.hpp"
#include "vactrap/params.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace vactrap {

// Grid, integrator and run-control settings. Zero for dt, t_max and the
// ground-state tolerance means "derive from the physics".
struct NumericsConfig {
    std::size_t grid_points = 4096;
    double half_extent = 400;      // 1/k
    double dt = 0;                 // s
    double ground_dt = 0;          // s, imaginary time
    double ground_tol = 0;         // rad/s per unit imaginary time
    double t_max = 0;              // s
    std::size_t trajectories = 20;
    std::uint64_t seed = 1;
    std::size_t sample_every = 1000;
    double overshoot = 0;          // s
    double escape_threshold = 0.5;
    double kick = 1.0;             // initial momentum kick, hbar k
    RecoilForm recoil = RecoilForm::DipoleLinear;
    bool absorbing = true;
    double mask_fraction = 0.05;
    double v0_target = 0;          // rad/s, 0 uses the depth of the configured laser
    double bound_length = 0;       // L of the bound-state criterion in 1/k, 0 = 10 lambda

    bool operator==(const NumericsConfig&) const = default;
};

struct RunConfig {
    std::string preset = "optical";
    PhysicalParams params = optical_preset();
    NumericsConfig numerics;

    bool operator==(const RunConfig&) const = default;
};

// Parses "<number> [unit]" into rad/s. Units: rad/s, krad/s, 2pi.Hz,
// 2pi.kHz, 2pi.MHz; no unit means rad/s.
double parse_frequency(std::string_view text);

// Parses a duration with optional unit s, ms, us, ns.
double parse_duration(std::string_view text);

// Starts from the preset named by a top-level `preset = ` line (the `preset`
// argument wins when given) and
// applies every key found. Unknown sections or keys are errors.
RunConfig read_config(std::istream& is, std::string_view preset = {});
RunConfig read_config_file(const std::filesystem::path& path, std::string_view preset = {});

// Applies one "section.key = value" override, e.g. "laser.omega", "0.7 2pi.MHz".
void apply_override(RunConfig& cfg, std::string_view dotted_key, std::string_view value);

// Full resolved configuration in the same INI format; rates in rad/s with
// enough digits to reparse to an identical RunConfig.
void write_config(std::ostream& os, const RunConfig& cfg);
std::string config_to_string(const RunConfig& cfg);

// Dotted key -> value map of the resolved configuration, for manifests.
std::map<std::string, std::string> config_entries(const RunConfig& cfg);

} // namespace vactrap
