#include <doctest.h>

#include "dense.hpp"
#include "ensemble_check.hpp"
#include "toy.hpp"
#include "vactrap/analytic.hpp"
#include "vactrap/errors.hpp"
#include "vactrap/montecarlo.hpp"

#include <cmath>
#include <sstream>

using namespace vactrap;

namespace {

// Gauss-Legendre nodes on [-1, 1], exact for polynomials up to degree 9.
double integrate(const std::function<double(double)>& f)
{
    const double x[] = {0.0, 0.5384693101056831, 0.9061798459386640};
    const double w[] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
    double s = w[0] * f(0);
    for (int i = 1; i < 3; ++i) s += w[i] * (f(x[i]) + f(-x[i]));
    return s;
}

TrajectoryOptions closed_options(double t_max)
{
    TrajectoryOptions o;
    o.t_max = t_max;
    o.sample_every = 50;
    o.absorbing = false;
    o.record_jump_energies = true;
    return o;
}

} // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("recoil densities are normalised with closed-form moments")
{
    const double second[] = {0.2, 0.4, 1.0 / 3};
    int k = 0;
    for (RecoilForm f : {RecoilForm::DipoleLinear, RecoilForm::DipoleCircular, RecoilForm::Uniform}) {
        const RecoilDistribution d{f};
        CHECK(std::abs(integrate([&](double u) { return d.density(u); }) - 1) < 1e-9);
        CHECK(integrate([&](double u) { return u * u * d.density(u); }) ==
              doctest::Approx(second[k++]).epsilon(1e-12));
        CHECK(d.density(1.5) == 0);
        CHECK(d.cdf(-1) == doctest::Approx(0).scale(1));
        CHECK(d.cdf(1) == doctest::Approx(1));
        for (double q = 0.01; q < 1; q += 0.07) CHECK(d.cdf(d.quantile(q)) == doctest::Approx(q).epsilon(1e-12));
        CHECK(recoil_form_from_string(to_string(f)) == f);
    }
    CHECK_THROWS_AS(recoil_form_from_string("isotropic"), ConfigError);
}

TEST_CASE("recoil sampler moments")
{
    const std::size_t n = 400000;
    for (RecoilForm f : {RecoilForm::DipoleLinear, RecoilForm::DipoleCircular, RecoilForm::Uniform}) {
        const RecoilDistribution d{f};
        const double m2 = integrate([&](double u) { return u * u * d.density(u); });
        const double m4 = integrate([&](double u) { return std::pow(u, 4) * d.density(u); });
        Rng rng(17);
        double s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = sample_recoil(d, rng);
            REQUIRE(u >= -1);
            REQUIRE(u <= 1);
            s1 += u;
            s2 += u * u;
        }
        const double mean = s1 / n, mean2 = s2 / n;
        CHECK(std::abs(mean) < 4 * std::sqrt(m2 / n));
        CHECK(std::abs(mean2 - m2) < 4 * std::sqrt((m4 - m2 * m2) / n));
        if (f == RecoilForm::Uniform) CHECK(std::abs(mean) < 3 / std::sqrt(12.0 * n));
        if (f == RecoilForm::DipoleLinear) CHECK(mean2 == doctest::Approx(0.2).epsilon(0.01));
    }
}

TEST_CASE("jump probabilities")
{
    const auto p = optical_preset();
    const auto g = make_grid(1024, 200);
    const double dt = 1e-9;
    const auto ground_only = gaussian_state(g, 0, 5, Channel::g0);
    const auto z = jump_probabilities(ground_only, p, g, dt);
    CHECK(z.cavity == 0);
    CHECK(z.atom == 0);

    auto photon = gaussian_state(g, 0, 5, Channel::g1);
    const auto c = jump_probabilities(photon, p, g, dt);
    CHECK(c.cavity == doctest::Approx(2 * p.kappa * dt).epsilon(1e-12));
    CHECK(c.atom == 0);
    photon.scale(3); // probabilities refer to the normalised state
    CHECK(jump_probabilities(photon, p, g, dt).cavity == doctest::Approx(2 * p.kappa * dt).epsilon(1e-12));

    const auto e = gaussian_state(g, 0, 5, Channel::e0);
    CHECK(jump_probabilities(e, p, g, dt).atom == doctest::Approx(2 * p.gamma * dt).epsilon(1e-12));
    CHECK_THROWS_AS(jump_probabilities(e, p, g, 0.2 / (2 * p.gamma)), StepTooLarge);
    CHECK_THROWS_AS(jump_probabilities(WaveState(g.n), p, g, dt), EmptyChannel);
}

TEST_CASE("jump channel ratio of the optical ground state")
{
    const auto p = optical_preset();
    const auto g = make_grid(1024, 200);
    const auto gs = ground_state(p, g);
    const auto pr = jump_probabilities(gs.state, p, g, 1e-9);
    const double expected = p.kappa * p.g0 * p.g0 / (p.gamma * p.delta * p.delta);
    CHECK(pr.cavity / pr.atom == doctest::Approx(expected).epsilon(0.1));
    // total rate is twice the effective decay rate
    CHECK(pr.total() / 1e-9 == doctest::Approx(2 * analytic::gamma_eff(p)).epsilon(0.05));
}

TEST_CASE("reset operators")
{
    const auto g = make_grid(1024, 100);
    const SpectralTransform fft(g.n);
    auto s = gaussian_state(g, 2, 4, Channel::g1);
    const auto e = gaussian_state(g, -3, 6, Channel::e0, 0.0);
    const auto a = gaussian_state(g, 0, 8, Channel::g0);
    for (std::size_t j = 0; j < g.n; ++j) {
        s.e0()[j] = 0.4 * e.e0()[j];
        s.g0()[j] = 0.7 * a.g0()[j];
    }

    const auto c = apply_cavity_jump(s, g);
    CHECK(norm_sq(c, g) == doctest::Approx(1).epsilon(1e-13));
    CHECK(channel_norm_sq(c, g, Channel::e0) == 0);
    CHECK(channel_norm_sq(c, g, Channel::g1) == 0);
    const double scale = 1 / std::sqrt(channel_norm_sq(s, g, Channel::g1));
    for (std::size_t j = 0; j < g.n; ++j) CHECK(std::abs(c.g0()[j] - scale * s.g1()[j]) < 1e-14);

    const auto a0 = apply_atom_jump(s, g, 0.0);
    const double se = 1 / std::sqrt(channel_norm_sq(s, g, Channel::e0));
    for (std::size_t j = 0; j < g.n; ++j) CHECK(std::abs(a0.g0()[j] - se * s.e0()[j]) < 1e-14);

    // unit kick on a packet at rest
    const auto a1 = apply_atom_jump(s, g, 1.0);
    CHECK(norm_sq(a1, g) == doctest::Approx(1).epsilon(1e-13));
    CHECK(mean_momentum(a1, fft, g) == doctest::Approx(-1).epsilon(1e-10));
    const double er = 4e3;
    CHECK(kinetic_energy(a1, fft, g, er) - kinetic_energy(a0, fft, g, er) ==
          doctest::Approx(er).epsilon(1e-10));

    CHECK_THROWS_AS(apply_cavity_jump(gaussian_state(g, 0, 4, Channel::g0), g), EmptyChannel);
    CHECK_THROWS_AS(apply_atom_jump(gaussian_state(g, 0, 4, Channel::g1), g, 0.5), EmptyChannel);
}

TEST_CASE("closed system in its ground state never jumps or escapes")
{
    auto p = toy::weak();
    p.kappa = p.gamma = 0;
    const auto g = toy::grid();
    const auto gs = ground_state(p, g);
    const auto r = run_trajectory(p, g, gs.state, 5, closed_options(2e5));
    CHECK(r.events.empty());
    CHECK_FALSE(r.trap_time);
    CHECK(r.seed == 5);
    CHECK(r.t_end == doctest::Approx(2e5).epsilon(0.01));
    for (const auto& smp : r.samples) {
        CHECK(smp.inside > 0.999);
        CHECK(smp.absorbed == 0);
    }
}

TEST_CASE("recoil energy identity holds for every atom jump")
{
    const auto p = toy::strong();
    const auto g = toy::grid();
    const auto init = kicked_initial_state(toy::smooth_state(g), g, 1.0);
    auto o = closed_options(60);
    o.escape_threshold = -1;
    std::size_t atom = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto r = run_trajectory(p, g, init, seed, o);
        double last = -1;
        for (const auto& e : r.events) {
            CHECK(e.t > last);
            last = e.t;
            if (e.channel != JumpChannel::Atom) continue;
            ++atom;
            CHECK(std::abs(e.u) <= 1);
            const double expected =
                p.recoil_energy * (e.u * e.u - 2 * e.u * e.source_momentum);
            CHECK(e.kinetic_after - e.source_kinetic ==
                  doctest::Approx(expected).scale(p.recoil_energy).epsilon(1e-9));
        }
    }
    CHECK(atom >= 10);
}

TEST_CASE("identical seeds give bit-identical trajectories")
{
    const auto p = toy::strong();
    const auto g = toy::grid();
    const auto init = kicked_initial_state(toy::smooth_state(g), g);
    auto o = closed_options(40);
    o.absorbing = true;
    auto same = [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
        if (a.events.size() != b.events.size() || a.samples.size() != b.samples.size()) return false;
        for (std::size_t i = 0; i < a.events.size(); ++i)
            if (a.events[i].t != b.events[i].t || a.events[i].channel != b.events[i].channel ||
                a.events[i].u != b.events[i].u)
                return false;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            if (a.samples[i].inside != b.samples[i].inside || a.samples[i].kinetic != b.samples[i].kinetic)
                return false;
        return a.trap_time == b.trap_time && a.t_end == b.t_end;
    };
    const auto a = run_trajectory(p, g, init, 42, o);
    const auto b = run_trajectory(p, g, init, 42, o);
    const auto c = run_trajectory(p, g, init, 43, o);
    CHECK(!a.events.empty());
    CHECK(same(a, b));
    CHECK_FALSE(same(a, c));

    const auto e1 = run_ensemble(p, g, init, 4, 42, o);
    CHECK(same(e1.records[0], a));
    CHECK(same(e1.records[1], c));
    std::ostringstream x, y;
    write_ensemble_csv(x, e1);
    write_ensemble_csv(y, run_ensemble(p, g, init, 4, 42, o));
    CHECK(x.str() == y.str());
}

TEST_CASE("trap time is the first crossing of the escape threshold")
{
    const auto p = toy::strong();
    const auto g = toy::grid();
    // kicked hard, the packet leaves the cavity region ballistically
    const auto init = apply_momentum_kick(gaussian_state(g, 0, 1.5, Channel::g0), g, -6);
    auto o = closed_options(100);
    o.sample_every = 5;
    const auto r = run_trajectory(p, g, init, 1, o);
    REQUIRE(r.trap_time);
    for (const auto& s : r.samples) {
        CHECK(s.inside >= 0);
        CHECK(s.inside <= 1);
        if (s.t < *r.trap_time) CHECK(s.inside > 0.5);
    }
    // the run stops at the trap time without overshoot
    CHECK(r.t_end - *r.trap_time < 5 * max_time_step(p, g));
    CHECK(r.t_end < 100);

    o.overshoot = 10;
    const auto longer = run_trajectory(p, g, init, 1, o);
    CHECK(longer.trap_time == r.trap_time);
    CHECK(longer.t_end == doctest::Approx(*r.trap_time + 10).epsilon(0.01));
}

TEST_CASE("absorbed weight counts as outside")
{
    auto p = toy::strong();
    p.kappa = p.gamma = 0;
    const auto g = toy::grid();
    const auto init = apply_momentum_kick(gaussian_state(g, 0, 1.5, Channel::g0), g, -6);
    auto o = closed_options(200);
    o.absorbing = true;
    o.mask_fraction = 0.3;
    o.escape_threshold = -1;
    const auto r = run_trajectory(p, g, init, 1, o);
    CHECK(r.samples.back().absorbed > 0.9);
    CHECK(r.samples.back().inside < 0.1);
}

TEST_CASE("summary statistics")
{
    const auto one = summarize({0.5e-3});
    CHECK(one.median == 0.5e-3);
    CHECK(one.mean == 0.5e-3);
    CHECK(one.lower_quartile == 0.5e-3);
    CHECK(one.n_escaped == 1);

    const auto s = summarize({4.0, 1.0, std::nullopt, 3.0, 2.0, std::nullopt, 5.0, 6.0});
    CHECK(s.n_escaped == 6);
    CHECK(s.n_censored == 2);
    CHECK(s.median == 4.0);
    CHECK(s.lower_quartile == 2.0);
    CHECK(s.upper_quartile == 6.0);
    CHECK(s.mean == 3.5);

    const auto mostly = summarize({1.0, std::nullopt, std::nullopt});
    CHECK_FALSE(mostly.median);
    CHECK(mostly.lower_quartile == 1.0);

    const auto none = summarize({});
    CHECK_FALSE(none.median);
    CHECK_FALSE(none.mean);
}

TEST_CASE("ensemble of one equals its trajectory")
{
    const auto p = toy::strong();
    const auto g = toy::grid();
    const auto init = apply_momentum_kick(gaussian_state(g, 0, 1.5, Channel::g0), g, -6);
    const auto o = closed_options(100);
    const auto e = run_ensemble(p, g, init, 1, 9, o);
    const auto r = run_trajectory(p, g, init, 9, o);
    CHECK(e.stats.median == r.trap_time);
    CHECK(e.stats.mean == r.trap_time);
    CHECK(e.records.size() == 1);
    CHECK_THROWS_AS(run_ensemble(p, g, init, 0, 9, o), Error);
}

TEST_CASE("jump rate of the stationary ground state is twice the effective decay rate")
{
    const auto p = toy::weak();
    const auto g = toy::grid();
    const auto gs = ground_state(p, g);
    auto o = closed_options(analytic::tau_eff(p));
    o.escape_threshold = -1;
    o.sample_every = 1000;
    o.record_jump_energies = false;
    const auto e = run_ensemble(p, g, gs.state, 200, 1, o);
    std::size_t jumps = 0;
    double time = 0;
    for (const auto& r : e.records) {
        jumps += r.events.size();
        time += r.t_end;
    }
    const double rate = static_cast<double>(jumps) / time;
    MESSAGE("jumps " << jumps << " rate/gamma_eff " << rate / analytic::gamma_eff(p));
    CHECK(rate == doctest::Approx(2 * analytic::gamma_eff(p)).epsilon(0.25));
}

TEST_CASE("higher loss rates shorten the trapping time")
{
    auto p = toy::weak();
    p.recoil_energy = 2e-4;
    p.kappa = 0.1;
    p.gamma = 0.1;
    const auto g = toy::grid();
    const auto init = kicked_initial_state(ground_state(p, g).state, g);
    TrajectoryOptions o;
    o.t_max = 40 * analytic::tau_eff(p);
    o.sample_every = 20;
    constexpr std::size_t runs = 40;
    const auto slow = run_ensemble(p, g, init, runs, 1, o);
    p.kappa *= 2;
    p.gamma *= 2;
    const auto fast = run_ensemble(p, g, init, runs, 1001, o);
    REQUIRE(slow.stats.median);
    REQUIRE(fast.stats.median);
    CHECK(*fast.stats.median < *slow.stats.median);

    // Mann-Whitney U with censored runs ranked last, normal approximation
    double u = 0;
    for (const auto& a : slow.records)
        for (const auto& b : fast.records) {
            const double ta = a.trap_time.value_or(INFINITY);
            const double tb = b.trap_time.value_or(INFINITY);
            u += tb < ta ? 1.0 : (tb == ta ? 0.5 : 0.0);
        }
    const double n = runs;
    const double z = (u - n * n / 2) / std::sqrt(n * n * (2 * n + 1) / 12);
    const double p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    MESSAGE("U " << u << " z " << z << " one-sided p " << p_value);
    CHECK(p_value < 0.05);
}

TEST_CASE("trajectory average reproduces the master equation")
{
    const auto p = toy::strong();
    const auto g = toy::grid();
    const auto init = kicked_initial_state(gaussian_state(g, 0, 2, Channel::g0), g, 1.0);
    const auto cmp = oracle::compare_with_master_equation(p, g, init, {1.0, 2.0, 4.0}, 1000, 0.005, 0.05);
    CHECK(cmp.jumps > 100);
    for (const auto& c : cmp.checks) {
        INFO(c.name << " at t=" << c.time << ": reference " << c.reference << ", trajectories "
                    << c.mean << " +- " << c.std_error);
        CHECK(c.within(3));
    }
}

TEST_CASE("event and ensemble CSV")
{
    TrajectoryRecord r;
    r.seed = 3;
    r.events = {{1e-6, JumpChannel::Cavity, 0, 0, 0, 0}, {2e-6, JumpChannel::Atom, -0.25, 0, 0, 0}};
    r.trap_time = 5e-4;
    std::ostringstream ev;
    write_event_csv(ev, r);
    CHECK(ev.str() ==
          "t,channel,u\n1.000000000e-06,cavity,0.000000000e+00\n2.000000000e-06,atom,-2.500000000e-01\n");

    EnsembleResult e;
    TrajectoryRecord censored;
    censored.seed = 4;
    e.records = {r, censored};
    std::ostringstream os;
    write_ensemble_csv(os, e);
    CHECK(os.str() == "seed,trap_time,n_events,censored\n3,5.000000000e-04,2,0\n4,nan,0,1\n");
}

}
