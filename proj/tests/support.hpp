#pragma once

// Parameter sets and independent reference computations shared by the tests.
// Nothing here calls into the Liouvillian builder or the solvers.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "xkerr/atom.hpp"
#include "xkerr/calibration.hpp"
#include "xkerr/constants.hpp"

namespace xkerr::test {

using constants::ghz;
using constants::mhz;

/// Rates fitted to the control-power map (Γ21 tied to 2 Γ10).
inline AtomParams map_atom() {
    AtomParams a;
    a.omega01 = ghz(7.1);
    a.omega12 = ghz(6.38);
    a.gamma_rel_10 = mhz(74);
    a.gamma_rel_21 = 2.0 * mhz(74);
    a.gamma_coh_10 = mhz(60);
    a.gamma_coh_21 = mhz(90);
    return a;
}

/// Rates for the Kerr-phase runs.
inline AtomParams kerr_atom() {
    AtomParams a;
    a.omega01 = ghz(7.26);
    a.omega12 = ghz(6.38);
    a.gamma_rel_10 = mhz(140);
    a.gamma_rel_21 = mhz(170);
    a.gamma_coh_10 = mhz(100);
    a.gamma_coh_21 = mhz(184);
    return a;
}

/// Probe at ω01 + δ carrying ⟨N_p⟩ photons, control off.
inline DriveParams weak_probe(const AtomParams& a, double delta = 0.0, double photons = 1e-4) {
    DriveParams d;
    d.omega_p = a.omega01 + delta;
    d.omega_c = a.omega12;
    d.rabi_p = std::sqrt(2.0 * a.gamma_rel_10 * photons * a.gamma_rel_10 / constants::two_pi);
    return d;
}

/// Steady-state transmission of a driven two-level system with population
/// decay Γ and coherence decay γ, in the convention t = 1 + r,
/// r = -i (Γ/Ω) ρ_10 and H = -δ|1><1| + Ω/2 σ_x.
inline std::complex<double> two_level_t(double gamma_rel, double gamma_coh, double delta,
                                        double rabi) {
    const std::complex<double> i(0.0, 1.0);
    const double x = delta / gamma_coh;
    const double sat = rabi * rabi / (gamma_rel * gamma_coh);
    return 1.0 - (gamma_rel / (2.0 * gamma_coh)) * (1.0 + i * x) / (1.0 + x * x + sat);
}

using M3 = Eigen::Matrix3cd;

inline M3 ket_bra(int i, int j) {
    M3 m = M3::Zero();
    m(i, j) = 1.0;
    return m;
}

inline M3 dissipator(const M3& c, const M3& rho) {
    const M3 cd = c.adjoint();
    return c * rho * cd - 0.5 * (cd * c * rho + rho * cd * c);
}

inline M3 ladder_hamiltonian(const AtomParams& a, const DriveParams& d) {
    const double dp = d.omega_p - a.omega01;
    const double dc = d.omega_c - a.omega12;
    M3 h = M3::Zero();
    h(1, 1) = -dp;
    h(2, 2) = -(dp + dc);
    h(0, 1) = h(1, 0) = d.rabi_p / 2.0;
    h(1, 2) = h(2, 1) = d.rabi_c / 2.0;
    return h;
}

/// dρ/dt with relaxation by jump operators and coherence decay imposed
/// element by element at (γ10, γ21, γ20).
inline M3 rhs_direct(const AtomParams& a, const DriveParams& d, double g20, const M3& rho) {
    const std::complex<double> i(0.0, 1.0);
    const M3 h = ladder_hamiltonian(a, d);
    M3 out = -i * (h * rho - rho * h);
    out(0, 0) += a.gamma_rel_10 * rho(1, 1);
    out(1, 1) += -a.gamma_rel_10 * rho(1, 1) + a.gamma_rel_21 * rho(2, 2);
    out(2, 2) += -a.gamma_rel_21 * rho(2, 2);
    const double g[3][3] = {{0, a.gamma_coh_10, g20}, {a.gamma_coh_10, 0, a.gamma_coh_21},
                            {g20, a.gamma_coh_21, 0}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (r != c) out(r, c) -= g[r][c] * rho(r, c);
    return out;
}

/// dρ/dt from relaxation and pure dephasing jump operators.
inline M3 rhs_jumps(const AtomParams& a, const DriveParams& d, double phi1, double phi2,
                    const M3& rho) {
    const std::complex<double> i(0.0, 1.0);
    const M3 h = ladder_hamiltonian(a, d);
    M3 out = -i * (h * rho - rho * h);
    out += a.gamma_rel_10 * dissipator(ket_bra(0, 1), rho);
    out += a.gamma_rel_21 * dissipator(ket_bra(1, 2), rho);
    out += 2.0 * phi1 * dissipator(ket_bra(1, 1), rho);
    out += 2.0 * phi2 * dissipator(ket_bra(2, 2), rho);
    return out;
}

/// Classical fixed-step RK4 for a matrix ODE.
template <class F>
M3 rk4(F&& f, M3 rho, double t_end, int steps) {
    const double h = t_end / steps;
    for (int k = 0; k < steps; ++k) {
        const M3 k1 = f(rho);
        const M3 k2 = f(rho + 0.5 * h * k1);
        const M3 k3 = f(rho + 0.5 * h * k2);
        const M3 k4 = f(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

inline M3 random_density_matrix(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    M3 g;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g(r, c) = {n(rng), n(rng)};
    M3 rho = g * g.adjoint();
    return rho / rho.trace();
}

/// A random atom whose rates admit non-negative level dephasing, with
/// drives of comparable size.
inline std::pair<AtomParams, DriveParams> random_consistent_point(std::mt19937_64& rng,
                                                                  bool dephasing_operator) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AtomParams a;
    a.omega01 = ghz(6.5 + u(rng));
    a.omega12 = a.omega01 - ghz(0.2 + 0.8 * u(rng));
    a.gamma_rel_10 = mhz(10 + 190 * u(rng));
    a.gamma_rel_21 = mhz(10 + 190 * u(rng));
    const double phi1 = mhz(60 * u(rng));
    const double phi2 = mhz(60 * u(rng));
    a.gamma_coh_10 = a.gamma_rel_10 / 2 + phi1;
    a.gamma_coh_21 = (a.gamma_rel_10 + a.gamma_rel_21) / 2 + phi1 + phi2;
    a.model = dephasing_operator ? DephasingModel::dephasing_operator : DephasingModel::direct_gamma;

    DriveParams d;
    d.omega_p = a.omega01 + mhz(-200 + 400 * u(rng));
    d.omega_c = a.omega12 + mhz(-200 + 400 * u(rng));
    d.rabi_p = mhz(1 + 199 * u(rng));
    d.rabi_c = u(rng) < 0.2 ? 0.0 : mhz(400 * u(rng));
    return {a, d};
}

}  // namespace xkerr::test
