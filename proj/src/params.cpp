#include "vactrap/params.hpp"

#include "vactrap/errors.hpp"
#include "vactrap/units.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace vactrap {

std::string_view to_string(ModeProfile m)
{
    switch (m) {
    case ModeProfile::Gaussian: return "gaussian";
    case ModeProfile::SquaredCosineEnvelope: return "cos2";
    }
    return "unknown";
}

ModeProfile mode_profile_from_string(std::string_view s)
{
    if (s == "gaussian" || s == "Gaussian") return ModeProfile::Gaussian;
    if (s == "cos2" || s == "SquaredCosineEnvelope") return ModeProfile::SquaredCosineEnvelope;
    throw ConfigError(fmt::format("unknown mode profile '{}'", s));
}

PhysicalParams optical_preset()
{
    using namespace units;
    PhysicalParams p;
    p.g0 = two_pi_mhz(16.0);
    p.kappa = two_pi_mhz(1.4);
    p.gamma = two_pi_mhz(3.0);
    p.omega = two_pi_mhz(0.70);
    p.delta = -two_pi_mhz(30.0);
    p.recoil_energy = krad_per_s(4.0);
    p.cavity_width = 100.0;
    p.mode_profile = ModeProfile::Gaussian;
    return p;
}

PhysicalParams microwave_preset()
{
    using namespace units;
    PhysicalParams p;
    p.g0 = two_pi_khz(67.0);
    p.kappa = two_pi_hz(1.6);
    p.gamma = two_pi_hz(1.6);
    p.omega = two_pi_khz(54.0);
    p.delta = -2.06 * p.g0;
    // Microwave photon recoil is negligible; keep it finite so the kinetic
    // operator stays well defined. 1e-3 of the optical value.
    p.recoil_energy = rad_per_s(4.0);
    p.cavity_width = 100.0;
    p.mode_profile = ModeProfile::Gaussian;
    return p;
}

std::vector<RegimePreset> presets()
{
    return {{"optical", optical_preset()}, {"microwave", microwave_preset()}};
}

PhysicalParams preset_by_name(std::string_view name)
{
    for (auto& r : presets())
        if (r.name == name) return r.params;
    throw ConfigError(fmt::format("unknown preset '{}'", name));
}

std::vector<Diagnostic> validate(const PhysicalParams& p, bool trapping)
{
    std::vector<Diagnostic> out;
    auto error = [&](std::string code, std::string msg) {
        out.push_back({Severity::Error, std::move(code), std::move(msg)});
    };
    auto warn = [&](std::string code, std::string msg) {
        out.push_back({Severity::Warn, std::move(code), std::move(msg)});
    };

    if (!(p.g0 > 0)) error("g0", "g0 must be positive");
    if (!(p.kappa >= 0)) error("kappa", "kappa must be non-negative");
    if (!(p.gamma >= 0)) error("gamma", "gamma must be non-negative");
    if (!(p.omega >= 0)) error("omega", "omega must be non-negative");
    if (!(p.recoil_energy > 0)) error("recoil_energy", "recoil energy must be positive");
    if (!(p.cavity_width > 0)) error("cavity_width", "cavity width must be positive");
    if (!(p.g0 > 0)) return out;

    if (trapping && p.delta >= -p.g0)
        error("no_trap", fmt::format("no attractive potential: delta = {:.4g} g0 is not below -g0",
                                     p.delta / p.g0));

    const double offset = std::abs(p.delta + p.g0);
    if (p.omega >= much_less_ratio * offset && p.omega > 0)
        warn("omega_regime", fmt::format("Omega = {:.4g} |Delta+g0| is not << |Delta+g0|; "
                                         "perturbative formulas are approximate",
                                         offset > 0 ? p.omega / offset : INFINITY));
    if (offset >= much_less_ratio * p.g0)
        warn("detuning_regime", fmt::format("|Delta+g0| = {:.4g} g0 is not << g0; "
                                            "the approximate trap depth is inaccurate",
                                            offset / p.g0));
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

double coupling_at(const PhysicalParams& p, double x)
{
    const double s = p.cavity_width;
    switch (p.mode_profile) {
    case ModeProfile::Gaussian:
        return p.g0 * std::exp(-x * x / (2.0 * s * s));
    case ModeProfile::SquaredCosineEnvelope: {
        if (std::abs(x) >= 2.0 * s) return 0.0;
        const double c = std::cos(std::numbers::pi * x / (4.0 * s));
        return p.g0 * c * c;
    }
    }
    return 0.0;
}

} // namespace vactrap
