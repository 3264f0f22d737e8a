#include <doctest.h>

#include "vactrap/config.hpp"
#include "vactrap/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace vactrap;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

RunConfig parse(const std::string& text, std::string_view preset = {})
{
    std::istringstream is(text);
    return read_config(is, preset);
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("frequency units")
{
    CHECK(parse_frequency("12.5") == 12.5);
    CHECK(parse_frequency("12.5 rad/s") == 12.5);
    CHECK(parse_frequency("4 krad/s") == 4000);
    CHECK(parse_frequency("1 2pi.Hz") == two_pi);
    CHECK(parse_frequency("3 2pi.kHz") == doctest::Approx(3e3 * two_pi).epsilon(1e-15));
    CHECK(parse_frequency("16 2pi.MHz") == doctest::Approx(16e6 * two_pi).epsilon(1e-15));
    CHECK(parse_frequency("  -30 2pi.MHz ") == doctest::Approx(-30e6 * two_pi).epsilon(1e-15));
    CHECK(parse_frequency("+1e3") == 1e3);
    CHECK_THROWS_AS(parse_frequency("16 MHz"), ConfigError);
    CHECK_THROWS_AS(parse_frequency("fast"), ConfigError);
    CHECK_THROWS_AS(parse_frequency(""), ConfigError);
}

TEST_CASE("duration units")
{
    CHECK(parse_duration("2") == 2);
    CHECK(parse_duration("2 s") == 2);
    CHECK(parse_duration("3 ms") == doctest::Approx(3e-3).epsilon(1e-15));
    CHECK(parse_duration("50 us") == doctest::Approx(5e-5).epsilon(1e-15));
    CHECK(parse_duration("0.2 ns") == doctest::Approx(2e-10).epsilon(1e-15));
    CHECK_THROWS_AS(parse_duration("1 h"), ConfigError);
}

TEST_CASE("sections override the preset")
{
    const auto cfg = parse(R"(
preset = microwave
[cavity]
kappa = 2 2pi.kHz
profile = cos2
[laser]
omega = 60 2pi.kHz
[numerics]
points = 2048
t_max = 10 ms
absorbing = no
recoil = uniform
)");
    CHECK(cfg.preset == "microwave");
    auto expected = microwave_preset();
    expected.kappa = 2e3 * two_pi;
    expected.omega = 60e3 * two_pi;
    expected.mode_profile = ModeProfile::SquaredCosineEnvelope;
    CHECK(cfg.params.g0 == expected.g0);
    CHECK(cfg.params.kappa == doctest::Approx(expected.kappa).epsilon(1e-15));
    CHECK(cfg.params.omega == doctest::Approx(expected.omega).epsilon(1e-15));
    CHECK(cfg.params.mode_profile == expected.mode_profile);
    CHECK(cfg.numerics.grid_points == 2048);
    CHECK(cfg.numerics.t_max == doctest::Approx(1e-2).epsilon(1e-15));
    CHECK_FALSE(cfg.numerics.absorbing);
    CHECK(cfg.numerics.recoil == RecoilForm::Uniform);
    CHECK(cfg.numerics.trajectories == NumericsConfig{}.trajectories);

    // an explicit preset argument wins over the file
    CHECK(parse("preset = microwave\n", "optical").params == optical_preset());
    CHECK(parse("").params == optical_preset());
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(parse("[laser]\nphase = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[optics]\nomega = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[laser]\nomega = 1 furlong\n"), ConfigError);
    CHECK_THROWS_AS(parse("[numerics]\npoints = -4\n"), ConfigError);
    CHECK_THROWS_AS(parse("[numerics]\nabsorbing = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse("[cavity]\nprofile = lorentzian\n"), ConfigError);
    CHECK_THROWS_AS(parse("preset = rydberg\n"), ConfigError);
    CHECK_THROWS_AS(parse("[laser\nomega = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("speed = 3\n"), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/vactrap.ini"), ConfigError);
    try {
        parse("[laser]\nphase = 1\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("laser.phase") != std::string::npos);
    }
}

TEST_CASE("overrides")
{
    RunConfig cfg;
    apply_override(cfg, "laser.delta", "-1.9 2pi.MHz");
    CHECK(cfg.params.delta == doctest::Approx(-1.9e6 * two_pi).epsilon(1e-15));
    apply_override(cfg, "numerics.seed", "77");
    CHECK(cfg.numerics.seed == 77);
    apply_override(cfg, "numerics.dt", "40 ns");
    CHECK(cfg.numerics.dt == doctest::Approx(4e-8).epsilon(1e-15));
    CHECK_THROWS_AS(apply_override(cfg, "delta", "1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "laser.detuning", "1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "laser.delta", "one"), ConfigError);
}

TEST_CASE("written configuration reparses to an identical configuration")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 50; ++i) {
        RunConfig cfg;
        cfg.preset = i % 2 ? "microwave" : "optical";
        cfg.params = preset_by_name(cfg.preset);
        cfg.params.omega *= 1 + 0.3 * u(rng);
        cfg.params.delta *= 1 + 0.3 * u(rng);
        cfg.params.recoil_energy = std::exp(10 * u(rng));
        cfg.params.cavity_width = 100 + 50 * u(rng);
        cfg.params.mode_profile = i % 3 ? ModeProfile::Gaussian : ModeProfile::SquaredCosineEnvelope;
        cfg.numerics.dt = 1e-8 * (1 + u(rng));
        cfg.numerics.t_max = 1e-3 * (1.5 + u(rng));
        cfg.numerics.seed = static_cast<std::uint64_t>(i) * 1234567891011ULL;
        cfg.numerics.escape_threshold = 0.5 + 0.4 * u(rng);
        cfg.numerics.absorbing = i % 2 == 0;
        cfg.numerics.recoil = static_cast<RecoilForm>(i % 3);
        cfg.numerics.v0_target = 1e4 * (1 + u(rng));

        const std::string text = config_to_string(cfg);
        const RunConfig back = parse(text);
        CHECK(back == cfg);
        CHECK(config_to_string(back) == text);
    }
}

TEST_CASE("config entries name every key")
{
    const auto e = config_entries(RunConfig{});
    CHECK(e.at("preset") == "optical");
    CHECK(e.count("laser.omega") == 1);
    CHECK(e.count("numerics.points") == 1);
    CHECK(e.at("numerics.points") == "4096");
    CHECK(e.size() == 26);
    // every entry is settable through an override
    RunConfig cfg;
    for (const auto& [k, v] : e)
        if (k != "preset") CHECK_NOTHROW(apply_override(cfg, k, v));
    CHECK(cfg == RunConfig{});
}

}
