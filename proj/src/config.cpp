#include "vactrap/config.hpp"

#include "vactrap/errors.hpp"
#include "vactrap/units.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace vactrap {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits "<number><ws><unit>" and parses the number.
std::pair<double, std::string_view> number_and_unit(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr == text.data())
        throw ConfigError(fmt::format("'{}' is not a number", text));
    return {v, trim(text.substr(static_cast<std::size_t>(ptr - text.data())))};
}

double parse_number(std::string_view text)
{
    const auto [v, unit] = number_and_unit(text);
    if (!unit.empty()) throw ConfigError(fmt::format("unexpected unit '{}' in '{}'", unit, text));
    return v;
}

std::uint64_t parse_unsigned(std::string_view text)
{
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(fmt::format("'{}' is not a non-negative integer", text));
    return v;
}

bool parse_bool(std::string_view text)
{
    text = trim(text);
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

std::string frequency_text(double v) { return fmt::format("{} rad/s", v); }
std::string duration_text(double v) { return fmt::format("{} s", v); }
std::string number_text(double v) { return fmt::format("{}", v); }

struct Key {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Owner>
Key frequency_key(std::string section, std::string name, Owner RunConfig::*owner,
                  double Owner::*field)
{
    return {std::move(section), std::move(name),
            [=](RunConfig& c, std::string_view v) { c.*owner.*field = parse_frequency(v); },
            [=](const RunConfig& c) { return frequency_text(c.*owner.*field); }};
}

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        constexpr auto P = &RunConfig::params;
        constexpr auto N = &RunConfig::numerics;

        k.push_back(frequency_key("atom", "gamma", P, &PhysicalParams::gamma));
        k.push_back(frequency_key("atom", "recoil_energy", P, &PhysicalParams::recoil_energy));
        k.push_back(frequency_key("cavity", "g0", P, &PhysicalParams::g0));
        k.push_back(frequency_key("cavity", "kappa", P, &PhysicalParams::kappa));
        k.push_back({"cavity", "width",
                     [](RunConfig& c, std::string_view v) { c.params.cavity_width = parse_number(v); },
                     [](const RunConfig& c) { return number_text(c.params.cavity_width); }});
        k.push_back({"cavity", "profile",
                     [](RunConfig& c, std::string_view v) {
                         c.params.mode_profile = mode_profile_from_string(trim(v));
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.params.mode_profile)); }});
        k.push_back(frequency_key("laser", "omega", P, &PhysicalParams::omega));
        k.push_back(frequency_key("laser", "delta", P, &PhysicalParams::delta));

        auto count_key = [&](std::string name, auto field) {
            k.push_back({"numerics", std::move(name),
                         [field](RunConfig& c, std::string_view v) {
                             c.numerics.*field = static_cast<std::remove_reference_t<
                                 decltype(c.numerics.*field)>>(parse_unsigned(v));
                         },
                         [field](const RunConfig& c) { return fmt::format("{}", c.numerics.*field); }});
        };
        auto number_key = [&](std::string name, auto field) {
            k.push_back({"numerics", std::move(name),
                         [field](RunConfig& c, std::string_view v) { c.numerics.*field = parse_number(v); },
                         [field](const RunConfig& c) { return number_text(c.numerics.*field); }});
        };
        auto duration_key = [&](std::string name, auto field) {
            k.push_back({"numerics", std::move(name),
                         [field](RunConfig& c, std::string_view v) { c.numerics.*field = parse_duration(v); },
                         [field](const RunConfig& c) { return duration_text(c.numerics.*field); }});
        };

        count_key("points", &NumericsConfig::grid_points);
        number_key("half_extent", &NumericsConfig::half_extent);
        duration_key("dt", &NumericsConfig::dt);
        duration_key("ground_dt", &NumericsConfig::ground_dt);
        k.push_back(frequency_key("numerics", "ground_tol", N, &NumericsConfig::ground_tol));
        duration_key("t_max", &NumericsConfig::t_max);
        count_key("trajectories", &NumericsConfig::trajectories);
        count_key("seed", &NumericsConfig::seed);
        count_key("sample_every", &NumericsConfig::sample_every);
        duration_key("overshoot", &NumericsConfig::overshoot);
        number_key("escape_threshold", &NumericsConfig::escape_threshold);
        number_key("kick", &NumericsConfig::kick);
        k.push_back({"numerics", "recoil",
                     [](RunConfig& c, std::string_view v) {
                         c.numerics.recoil = recoil_form_from_string(trim(v));
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.numerics.recoil)); }});
        k.push_back({"numerics", "absorbing",
                     [](RunConfig& c, std::string_view v) { c.numerics.absorbing = parse_bool(v); },
                     [](const RunConfig& c) { return std::string(c.numerics.absorbing ? "true" : "false"); }});
        number_key("mask_fraction", &NumericsConfig::mask_fraction);
        k.push_back(frequency_key("numerics", "v0_target", N, &NumericsConfig::v0_target));
        number_key("bound_length", &NumericsConfig::bound_length);
        return k;
    }();
    return table;
}

const Key& find_key(std::string_view section, std::string_view name)
{
    for (const auto& k : keys())
        if (k.section == section && k.name == name) return k;
    throw ConfigError(fmt::format("unknown config key '{}.{}'", section, name));
}

RunConfig start_from(std::string_view preset)
{
    RunConfig cfg;
    cfg.preset = std::string(preset);
    cfg.params = preset_by_name(preset);
    return cfg;
}

} // namespace

double parse_frequency(std::string_view text)
{
    const auto [v, unit] = number_and_unit(text);
    using namespace units;
    if (unit.empty() || unit == "rad/s") return v;
    if (unit == "krad/s") return krad_per_s(v);
    if (unit == "2pi.Hz") return two_pi_hz(v);
    if (unit == "2pi.kHz") return two_pi_khz(v);
    if (unit == "2pi.MHz") return two_pi_mhz(v);
    throw ConfigError(fmt::format("unknown frequency unit '{}' in '{}'", unit, text));
}

double parse_duration(std::string_view text)
{
    const auto [v, unit] = number_and_unit(text);
    if (unit.empty() || unit == "s") return v;
    if (unit == "ms") return v * 1e-3;
    if (unit == "us") return v * 1e-6;
    if (unit == "ns") return v * 1e-9;
    throw ConfigError(fmt::format("unknown time unit '{}' in '{}'", unit, text));
}

RunConfig read_config(std::istream& is, std::string_view preset)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }

    std::string name = preset.empty() ? "optical" : std::string(preset);
    for (const auto& [key, node] : tree) {
        if (node.empty() && key == "preset") {
            if (preset.empty()) name = std::string(trim(node.data()));
        } else if (node.empty()) {
            throw ConfigError(fmt::format("config key '{}' outside a section", key));
        }
    }

    RunConfig cfg = start_from(name);
    for (const auto& [section, node] : tree) {
        if (node.empty()) continue;
        for (const auto& [key, value] : node) {
            try {
                find_key(section, key).set(cfg, value.data());
            } catch (const ConfigError& e) {
                throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
            }
        }
    }
    return cfg;
}

RunConfig read_config_file(const std::filesystem::path& path, std::string_view preset)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    return read_config(in, preset);
}

void apply_override(RunConfig& cfg, std::string_view dotted_key, std::string_view value)
{
    const auto dot = dotted_key.find('.');
    if (dot == std::string_view::npos)
        throw ConfigError(fmt::format("override '{}' must look like section.key", dotted_key));
    const Key& k = find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
    try {
        k.set(cfg, value);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", dotted_key, e.what()));
    }
}

void write_config(std::ostream& os, const RunConfig& cfg)
{
    os << "preset = " << cfg.preset << '\n';
    std::string section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            section = k.section;
            os << "\n[" << section << "]\n";
        }
        os << k.name << " = " << k.get(cfg) << '\n';
    }
}

std::string config_to_string(const RunConfig& cfg)
{
    std::ostringstream os;
    write_config(os, cfg);
    return os.str();
}

std::map<std::string, std::string> config_entries(const RunConfig& cfg)
{
    std::map<std::string, std::string> out;
    out["preset"] = cfg.preset;
    for (const auto& k : keys()) out[k.section + "." + k.name] = k.get(cfg);
    return out;
}

} // namespace vactrap
