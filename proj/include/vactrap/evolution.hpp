#pragma once

#include "vactrap/grid.hpp"
#include "vactrap/kernels.hpp"
#include "vactrap/params.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace vactrap {

// 3x3 Hamiltonian block at one position in the basis {|g,0>, |e,0>, |g,1>},
// rotating frame of the laser:
//   diag(Delta/2, -Delta/2, -Delta/2), Omega/2 on g0<->e0, g(x) on e0<->g1,
// plus diag(0, -i Gamma, -i kappa) for the no-jump effective Hamiltonian.
using SubspaceMatrix = Eigen::Matrix3cd;

SubspaceMatrix build_subspace_matrix(const PhysicalParams& p, double x, bool effective);

enum class StepMode { RealHermitian, RealEffective, Imaginary };

// dt * E_max must stay below this for a step to be accepted.
inline constexpr double max_step_phase = 0.1;

// Spectral bound that limits the split-step accuracy: the largest kinetic
// energy on the grid plus the range of the laser-dressed ground-level energy
// across the grid. The fast internal dynamics at |Delta| and g0 is
// exponentiated exactly per grid point and does not enter.
double step_energy_bound(const PhysicalParams& p, const Grid& grid);

// Largest dt accepted by Propagator for these inputs.
double max_time_step(const PhysicalParams& p, const Grid& grid);

// Second-order split-step propagator with cached per-point 3x3 exponentials
// and kinetic phases. Each step: half internal, full kinetic in spectral
// space, half internal. Imaginary mode renormalises after every step.
class Propagator {
public:
    Propagator(const PhysicalParams& p, const Grid& grid, double dt, StepMode mode);

    void step(WaveState& s) const;
    void advance(WaveState& s, std::size_t steps) const;

    double dt() const { return dt_; }
    StepMode mode() const { return mode_; }
    const Grid& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    const SpectralTransform& transform() const { return fft_; }

    // Constant subtracted from the subspace Hamiltonian before exponentiating.
    double energy_shift() const { return shift_; }

private:
    PhysicalParams params_;
    Grid grid_;
    double dt_;
    StepMode mode_;
    double shift_;
    SpectralTransform fft_;
    std::vector<kernels::Mat3> half_internal_;
    std::vector<cplx> kinetic_;
};

// One step; builds a Propagator on every call, prefer Propagator in loops.
WaveState step(WaveState s, const PhysicalParams& p, const Grid& grid, double dt, StepMode mode);

// <H> / <psi|psi> for the Hermitian Hamiltonian (kinetic + subspace), rad/s.
double energy(const WaveState& s, const PhysicalParams& p, const Grid& grid,
              const SpectralTransform& fft);

struct GroundStateOptions {
    double dt = 0;           // imaginary time step; 0 picks the accepted maximum
    double tol = 0;          // |dE/dtau| threshold, 0 picks 1e-4 * V0 (or 1e-4 * E_R)
    double seed_width = 0;   // width of the seed Gaussian, 0 picks cavity_width / 4
    std::size_t check_every = 200;
    std::size_t max_steps = 5'000'000;
};

struct GroundStateResult {
    WaveState state;
    double energy = 0;  // rad/s, rotating frame
    std::size_t steps = 0;
    double imaginary_time = 0;
};

GroundStateResult ground_state(const PhysicalParams& p, const Grid& grid,
                               const GroundStateOptions& opts = {});

// Lowest eigenvector of the laser-dressed ground-level problem
// E_R p^2 + lambda0(x) (adiabatic elimination of |e,0> and |g,1>), as a
// state in the g0 channel. Same imaginary-time scheme on one channel.
GroundStateResult adiabatic_ground_state(const PhysicalParams& p, const Grid& grid,
                                         const GroundStateOptions& opts = {});

struct DecaySample {
    double t = 0;
    double norm_sq = 0;
    std::array<double, 3> populations{}; // g0, e0, g1, normalised
    double mean_x = 0;
    double kinetic = 0;
};

struct DecayResult {
    double decay_time = 0;  // s, norm^2 = 1/e
    std::vector<DecaySample> history;
};

// Evolves s0 under the effective Hamiltonian and returns the time at which the
// no-jump probability reaches 1/e. Throws Timeout when it does not by t_max.
DecayResult no_jump_decay_time(const WaveState& s0, const PhysicalParams& p, const Grid& grid,
                               double dt, double t_max, std::size_t sample_every = 100);

// Columns t, norm2, P_g0, P_g1, P_e0, mean_x, E_kin.
void write_history_csv(std::ostream& os, const std::vector<DecaySample>& history);

} // namespace vactrap
