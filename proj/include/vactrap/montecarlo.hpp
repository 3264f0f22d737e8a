#pragma once

#include "vactrap/evolution.hpp"
#include "vactrap/grid.hpp"
#include "vactrap/params.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace vactrap {

using Rng = std::mt19937_64;

enum class RecoilForm {
    DipoleLinear,   // 3/4 (1 - u^2)
    DipoleCircular, // 3/8 (1 + u^2)
    Uniform,        // 1/2
};

std::string_view to_string(RecoilForm f);
RecoilForm recoil_form_from_string(std::string_view s);

// Distribution N(u) of the recoil momentum (hbar k units) projected on the
// cavity axis after a spontaneous emission, u in [-1, 1].
struct RecoilDistribution {
    RecoilForm form = RecoilForm::DipoleLinear;

    double density(double u) const;
    double cdf(double u) const;
    // Closed-form inverse of cdf on [0, 1].
    double quantile(double q) const;
};

double sample_recoil(const RecoilDistribution& d, Rng& rng);

enum class JumpChannel { Cavity, Atom };

std::string_view to_string(JumpChannel c);

struct JumpEvent {
    double t = 0;
    JumpChannel channel = JumpChannel::Cavity;
    double u = 0; // recoil, atom jumps only
    // Kinetic bookkeeping for the recoil identity: energy of the source
    // profile before the kick, its mean momentum, and the energy right after.
    double source_kinetic = 0;
    double source_momentum = 0;
    double kinetic_after = 0;
};

struct JumpProbabilities {
    double cavity = 0;
    double atom = 0;
    double total() const { return cavity + atom; }
};

// Jump probabilities stay below this per step.
inline constexpr double max_jump_probability = 0.1;

// First-order probabilities 2 kappa |phi_g1|^2 dt and 2 Gamma |phi_e0|^2 dt of
// the normalised state. Throws StepTooLarge when their sum reaches 0.1.
JumpProbabilities jump_probabilities(const WaveState& s, const PhysicalParams& p,
                                     const Grid& grid, double dt);

// Reset sqrt(2 kappa) |g,0><g,1| followed by normalisation.
WaveState apply_cavity_jump(WaveState s, const Grid& grid);

// Reset exp(-i u x) sqrt(2 Gamma) |g,0><e,0| followed by normalisation.
WaveState apply_atom_jump(WaveState s, const Grid& grid, double u);

struct TrajectorySample {
    double t = 0;
    double inside = 0;              // probability for |x| < sigma, absorbed weight counted outside
    std::array<double, 3> populations{}; // g0, e0, g1
    double kinetic = 0;             // rad/s
    double absorbed = 0;            // weight removed by the absorbing boundary
};

struct TrajectoryOptions {
    double dt = 0;                    // s; 0 picks half the accepted maximum
    double t_max = 0;                 // s
    std::size_t sample_every = 1000;  // steps between samples
    double overshoot = 0;             // keep running this long after escape
    double escape_threshold = 0.5;    // inside probability defining escape
    RecoilDistribution recoil{};
    bool absorbing = true;
    double mask_fraction = 0.05;
    bool record_jump_energies = false;
};

struct TrajectoryRecord {
    std::vector<JumpEvent> events;
    std::vector<TrajectorySample> samples;
    std::optional<double> trap_time; // empty when the atom did not escape
    std::uint64_t seed = 0;
    double t_end = 0;

    std::size_t count(JumpChannel c) const;
};

// Quantum-jump trajectory, deterministic given (seed, dt, grid, params).
TrajectoryRecord run_trajectory(const Propagator& prop, const WaveState& init,
                                std::uint64_t seed, const TrajectoryOptions& opts);

TrajectoryRecord run_trajectory(const PhysicalParams& p, const Grid& grid, const WaveState& init,
                                std::uint64_t seed, const TrajectoryOptions& opts);

struct EnsembleStats {
    std::vector<std::optional<double>> trap_times; // per trajectory, empty = censored
    std::optional<double> median;                  // empty when more than half censored
    std::optional<double> lower_quartile;
    std::optional<double> upper_quartile;
    std::optional<double> mean;                    // over escaped trajectories
    std::size_t n_escaped = 0;
    std::size_t n_censored = 0;
};

// Quantiles follow the survival convention: the q-quantile is the first time
// by which at least a fraction q of all trajectories escaped; censored runs
// count as escaping after t_max.
EnsembleStats summarize(const std::vector<std::optional<double>>& trap_times);

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<TrajectoryRecord> records;
};

// n trajectories with seeds base_seed + i, run in parallel (OpenMP).
EnsembleResult run_ensemble(const PhysicalParams& p, const Grid& grid, const WaveState& init,
                            std::size_t n, std::uint64_t base_seed, const TrajectoryOptions& opts);

// Ground state kicked by u on all channels: the trapping-time initial condition.
WaveState kicked_initial_state(const WaveState& ground, const Grid& grid, double u = 1.0);

// Columns t, channel, u.
void write_event_csv(std::ostream& os, const TrajectoryRecord& r);
// Columns seed, trap_time, n_events, censored.
void write_ensemble_csv(std::ostream& os, const EnsembleResult& e);

} // namespace vactrap
