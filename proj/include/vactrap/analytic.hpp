#pragma once

#include "vactrap/params.hpp"

#include <array>
#include <complex>
#include <utility>

// Closed-form physics of the laser-dressed |g,0>, |e,0>, |g,1> subspace:
// perturbative spectrum, trap depth, effective decay and the optimal laser
// operating point.
namespace vactrap::analytic {

// Relative threshold (times g0) below which |Delta +- g| counts as degenerate.
inline constexpr double degeneracy_epsilon = 1e-6;

// Energies of the Jaynes-Cummings dressed states |+->, interaction picture.
std::pair<double, double> dressed_energies(double g);

struct PerturbativeLevels {
    double lambda0 = 0; // laser-dressed |g,0>
    double lambda1 = 0; // lower dressed state |->
    double lambda2 = 0; // upper dressed state |+>, printed (Delta + g) denominator
    double lambda2_alt = 0; // |+> with the (Delta - g) denominator of its own Stark pair
    double amp_g1_in_psi0 = 0; // Omega-linear admixture of |g,1> in the dressed ground state
    double amp_e0_in_psi0 = 0; // and of |e,0>
};

// Lowest-order (Omega^2) eigenvalues of the subspace Hamiltonian at x.
PerturbativeLevels perturbative_levels(const PhysicalParams& p, double x);

// Same, for an explicit coupling value g instead of a position.
PerturbativeLevels perturbative_levels_at_coupling(const PhysicalParams& p, double g);

struct Eigenpair {
    double value = 0;
    // Components in the basis {|g,0>, |e,0>, |g,1>}.
    std::array<double, 3> vector{};
};

// Exact eigensystem of the 3x3 subspace Hamiltonian (no kinetic or loss
// terms). Index 0/1/2 correspond to lambda0/lambda1/lambda2, assigned by
// maximal overlap with |g,0>, |->, |+>.
std::array<Eigenpair, 3> exact_subspace_spectrum(const PhysicalParams& p, double x);
std::array<Eigenpair, 3> exact_subspace_spectrum_at_coupling(const PhysicalParams& p, double g);

// Trap depth lambda0(g=0) - lambda0(g=g0). Positive when |Delta| > g0.
double potential_depth_exact(const PhysicalParams& p);

// Small-offset estimate Omega^2 / (8 |Delta + g0|).
double potential_depth_approx(const PhysicalParams& p);

// Single-loss lifetime estimate (4|Delta+g0|^2/Omega^2) min(1/Gamma, 1/kappa), seconds.
double lifetime_estimate(const PhysicalParams& p);

// Loss rate of the dressed ground state at the cavity centre, rad/s.
double gamma_eff(const PhysicalParams& p);

// 1 / gamma_eff, seconds.
double tau_eff(const PhysicalParams& p);

// V0 (L / lambda)^2 / E_R with lambda = 2 pi in units of 1/k. Values >= 1
// guarantee a bound state in three dimensions; in 1D one always exists.
double bound_state_margin(double v0, double length, double recoil_energy);

struct LaserDesign {
    double omega = 0;   // rad/s
    double delta = 0;   // rad/s, < -g0
    double v0 = 0;      // rad/s
    double tau_eff = 0; // s
    bool feasible = true; // false when Omega >= |Delta| (outside the weak-drive picture)
};

// Maximises tau_eff at fixed trap depth. Only g0, kappa and gamma of p are used.
// With d = |Delta|/g0 and c = kappa/Gamma the optimum solves
// d^4 - (c + 3) d^2 - c = 0.
LaserDesign optimize_laser(const PhysicalParams& p, double v0_target);

// Omega that realises trap depth v0 at detuning delta (inverse of potential_depth_exact).
double omega_for_depth(const PhysicalParams& p, double delta, double v0);

} // namespace vactrap::analytic
