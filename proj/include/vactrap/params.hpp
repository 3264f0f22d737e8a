#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vactrap {

enum class ModeProfile {
    Gaussian,              // g0 * exp(-x^2 / (2 sigma^2))
    SquaredCosineEnvelope, // g0 * cos^2(pi x / (4 sigma)) for |x| < 2 sigma, else 0
};

std::string_view to_string(ModeProfile m);
ModeProfile mode_profile_from_string(std::string_view s);

// Atom-cavity-laser parameters. Rates in rad/s, cavity_width in units of 1/k.
struct PhysicalParams {
    double g0 = 0.0;            // peak atom-cavity coupling
    double kappa = 0.0;         // cavity field decay rate
    double gamma = 0.0;         // atomic (amplitude) decay rate
    double omega = 0.0;         // laser Rabi frequency
    double delta = 0.0;         // laser detuning omega_L - omega_0, negative to trap
    double recoil_energy = 0.0; // E_R = hbar k^2 / 2m
    double cavity_width = 100.0;
    ModeProfile mode_profile = ModeProfile::Gaussian;

    bool operator==(const PhysicalParams&) const = default;
};

struct RegimePreset {
    std::string name;
    PhysicalParams params;
};

// Strongly coupled optical cavity (85Rb) at the optimal laser point for a
// 1.02e4 rad/s deep trap.
PhysicalParams optical_preset();

// Circular Rydberg atoms in a microwave cavity at the optimal laser point for
// the same trap depth. Recoil is negligible in this regime.
PhysicalParams microwave_preset();

std::vector<RegimePreset> presets();
PhysicalParams preset_by_name(std::string_view name);

enum class Severity { Warn, Error };

struct Diagnostic {
    Severity severity;
    std::string code;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Ratio below which "a << b" is considered satisfied by validate().
inline constexpr double much_less_ratio = 0.1;

// Checks field invariants and the perturbative regime
// Omega << |Delta + g0| << g0. Never throws.
std::vector<Diagnostic> validate(const PhysicalParams& p, bool trapping = true);

bool has_errors(const std::vector<Diagnostic>& diags);

// Position-dependent coupling g(x) in rad/s; x in units of 1/k.
double coupling_at(const PhysicalParams& p, double x);

} // namespace vactrap
