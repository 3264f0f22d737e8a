#include "vactrap/analytic.hpp"

#include "vactrap/errors.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vactrap::analytic {

namespace {

void require_nondegenerate(double denom, double g0, const char* what)
{
    if (std::abs(denom) < degeneracy_epsilon * g0)
        throw DegenerateDenominator(fmt::format("{} is degenerate ({:.3g} rad/s)", what, denom));
}

} // namespace

std::pair<double, double> dressed_energies(double g) { return {g, -g}; }

PerturbativeLevels perturbative_levels(const PhysicalParams& p, double x)
{
    return perturbative_levels_at_coupling(p, coupling_at(p, x));
}

PerturbativeLevels perturbative_levels_at_coupling(const PhysicalParams& p, double g)
{
    const double d = p.delta;
    const double plus = d + g;
    const double minus = d - g;
    require_nondegenerate(plus, p.g0, "Delta + g");
    require_nondegenerate(minus, p.g0, "Delta - g");

    const double w2 = p.omega * p.omega;
    PerturbativeLevels l;
    l.lambda0 = d / 2 + w2 / 8 * (1 / plus + 1 / minus);
    l.lambda1 = -d / 2 - g - w2 / (8 * plus);
    l.lambda2 = -d / 2 + g - w2 / (8 * plus);
    l.lambda2_alt = -d / 2 + g - w2 / (8 * minus);
    const double amp = (p.omega / 2) / (plus * minus);
    l.amp_g1_in_psi0 = amp * g;
    l.amp_e0_in_psi0 = amp * d;
    return l;
}

std::array<Eigenpair, 3> exact_subspace_spectrum(const PhysicalParams& p, double x)
{
    return exact_subspace_spectrum_at_coupling(p, coupling_at(p, x));
}

std::array<Eigenpair, 3> exact_subspace_spectrum_at_coupling(const PhysicalParams& p, double g)
{
    // basis {|g,0>, |e,0>, |g,1>}
    Eigen::Matrix3d h;
    h << p.delta / 2, p.omega / 2, 0,
         p.omega / 2, -p.delta / 2, g,
         0, g, -p.delta / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);

    const double r = 1 / std::numbers::sqrt2;
    Eigen::Matrix3d ref;
    ref.col(0) << 1, 0, 0;  // |g,0>
    ref.col(1) << 0, -r, r; // |->
    ref.col(2) << 0, r, r;  // |+>

    const Eigen::Matrix3d overlap = (ref.transpose() * es.eigenvectors()).cwiseAbs2();
    std::array<int, 3> perm{0, 1, 2};
    std::array<int, 3> best = perm;
    double best_score = -1;
    do {
        double s = 0;
        for (int i = 0; i < 3; ++i) s += overlap(i, perm[i]);
        if (s > best_score) {
            best_score = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::array<Eigenpair, 3> out;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d v = es.eigenvectors().col(best[i]);
        if (ref.col(i).dot(v) < 0) v = -v;
        out[i].value = es.eigenvalues()(best[i]);
        out[i].vector = {v(0), v(1), v(2)};
    }
    return out;
}

double potential_depth_exact(const PhysicalParams& p)
{
    const double d = p.delta;
    const double g0 = p.g0;
    require_nondegenerate(std::abs(d) - g0, g0, "|Delta| - g0");
    if (d == 0) throw DegenerateDenominator("Delta = 0");
    return -p.omega * p.omega * g0 * g0 / (4 * d * (d * d - g0 * g0));
}

double potential_depth_approx(const PhysicalParams& p)
{
    const double offset = p.delta + p.g0;
    require_nondegenerate(offset, p.g0, "Delta + g0");
    return p.omega * p.omega / (8 * std::abs(offset));
}

double lifetime_estimate(const PhysicalParams& p)
{
    if (!(p.omega > 0)) throw DegenerateInput("lifetime estimate needs Omega > 0");
    const double fastest = std::max(p.kappa, p.gamma);
    if (!(fastest > 0)) throw DegenerateInput("lifetime estimate needs kappa or Gamma > 0");
    const double offset = p.delta + p.g0;
    return 4 * offset * offset / (p.omega * p.omega) / fastest;
}

double gamma_eff(const PhysicalParams& p)
{
    const double d2 = p.delta * p.delta;
    const double g2 = p.g0 * p.g0;
    require_nondegenerate(std::abs(p.delta) - p.g0, p.g0, "|Delta| - g0");
    const double denom = d2 - g2;
    return p.omega * p.omega * (p.kappa * g2 + p.gamma * d2) / (4 * denom * denom);
}

double tau_eff(const PhysicalParams& p)
{
    const double rate = gamma_eff(p);
    if (!(rate > 0)) throw DegenerateInput("effective decay rate is zero");
    return 1 / rate;
}

double bound_state_margin(double v0, double length, double recoil_energy)
{
    const double ratio = length / (2 * std::numbers::pi);
    return v0 * ratio * ratio / recoil_energy;
}

double omega_for_depth(const PhysicalParams& p, double delta, double v0)
{
    const double ad = std::abs(delta);
    return std::sqrt(4 * v0 * ad * (delta * delta - p.g0 * p.g0)) / p.g0;
}

LaserDesign optimize_laser(const PhysicalParams& p, double v0_target)
{
    if (!(v0_target > 0)) throw DegenerateInput("target trap depth must be positive");
    if (!(p.kappa + p.gamma > 0)) throw DegenerateInput("need kappa + Gamma > 0");
    if (p.gamma == 0)
        throw Unbounded("with Gamma = 0 the lifetime grows without bound as |Delta|/g0 -> inf "
                        "(tau_eff ~ |Delta| / (kappa V0))");

    // tau_eff(d) = g0 (d^2 - 1) / (V0 d (kappa + Gamma d^2)) after eliminating
    // Omega through the depth constraint; stationary point is a biquadratic.
    const double c = p.kappa / p.gamma;
    const double b = c + 3;
    const double d2 = (b + std::sqrt(b * b + 4 * c)) / 2;
    const double d = std::sqrt(d2);

    LaserDesign out;
    out.delta = -d * p.g0;
    out.omega = omega_for_depth(p, out.delta, v0_target);
    PhysicalParams q = p;
    q.delta = out.delta;
    q.omega = out.omega;
    out.v0 = potential_depth_exact(q);
    out.tau_eff = tau_eff(q);
    out.feasible = out.omega < std::abs(out.delta);
    return out;
}

} // namespace vactrap::analytic
