#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "support.hpp"
#include "xkerr/atom.hpp"
#include "xkerr/errors.hpp"

using namespace xkerr;
using namespace xkerr::test;

namespace {

Matrix3c apply(const Liouvillian& l, const Matrix3c& rho) {
    return DensityMatrix::from_vector(l * DensityMatrix(rho).vectorized()).matrix();
}

double max_abs(const Matrix3c& m) { return m.cwiseAbs().maxCoeff(); }

AtomParams bare_atom() {
    AtomParams a;
    a.omega01 = ghz(7.1);
    a.omega12 = ghz(6.38);
    return a;
}

}  // namespace

TEST_CASE("hamiltonian: zero drives and detunings give the zero matrix") {
    const AtomParams a = map_atom();
    DriveParams d;
    d.omega_p = a.omega01;
    d.omega_c = a.omega12;
    CHECK(max_abs(build_hamiltonian(a, d)) == 0.0);
}

TEST_CASE("hamiltonian: probe detuning shifts levels 1 and 2") {
    const AtomParams a = map_atom();
    DriveParams d;
    d.omega_p = a.omega01 + mhz(20);
    d.omega_c = a.omega12;
    const Matrix3c h = build_hamiltonian(a, d);
    Matrix3c expected = Matrix3c::Zero();
    expected(1, 1) = -mhz(20);
    expected(2, 2) = -mhz(20);
    // ω01 + δ - ω01 loses the low bits of ω01.
    CHECK(max_abs(h - expected) <= 4e-16 * a.omega01);
}

TEST_CASE("hamiltonian: hermitian and equal to the reference form") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const auto [a, d] = random_consistent_point(rng, false);
        const Matrix3c h = build_hamiltonian(a, d);
        CHECK(max_abs(h - h.adjoint()) == 0.0);
        CHECK(max_abs(h - ladder_hamiltonian(a, d)) <= 1e-6);
    }
}

TEST_CASE("liouvillian: zero rates and drives give L = 0") {
    AtomParams a = bare_atom();
    DriveParams d;
    d.omega_p = a.omega01;
    d.omega_c = a.omega12;
    CHECK(build_liouvillian(a, d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("liouvillian: both modes agree with the element-wise master equation") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const bool op = k % 2 == 1;
        const auto [a, d] = random_consistent_point(rng, op);
        const Liouvillian l = build_liouvillian(a, d);
        const PureDephasing phi = pure_dephasing(a);
        const Matrix3c rho = random_density_matrix(rng);
        const Matrix3c got = apply(l, rho);
        const double scale = l.cwiseAbs().maxCoeff();
        const Matrix3c jumps = rhs_jumps(a, d, phi.level1, phi.level2, rho);
        const Matrix3c direct = rhs_direct(a, d, effective_gamma20(a), rho);
        CHECK(max_abs(got - jumps) <= 1e-12 * scale);
        CHECK(max_abs(got - direct) <= 1e-12 * scale);
    }
}

TEST_CASE("liouvillian: jump-operator route implies the level-2 coherence rate") {
    AtomParams a = kerr_atom();
    a.gamma_coh_21 = mhz(200);
    a.model = DephasingModel::dephasing_operator;
    const PureDephasing phi = pure_dephasing(a);
    REQUIRE(phi.consistent());
    CHECK(effective_gamma20(a) == doctest::Approx(a.gamma_rel_21 / 2 + phi.level2));
    // ρ_20 sees Γ21/2 and the dephasing of level 2 only.
    CHECK(default_gamma20(a) == doctest::Approx(a.gamma_coh_21 - a.gamma_coh_10));
}

TEST_CASE("liouvillian: explicit gamma_coh_20 is honored in direct mode") {
    AtomParams a = map_atom();
    a.gamma_coh_20 = mhz(33);
    const DriveParams d = weak_probe(a);
    const Liouvillian l = build_liouvillian(a, d);
    CHECK(l(vec_index(2, 0), vec_index(2, 0)).real() == doctest::Approx(-mhz(33)));
}

TEST_CASE("liouvillian: inconsistent rates use the mean coherence rate for rho_20") {
    CHECK(effective_gamma20(map_atom()) == doctest::Approx(mhz(75)));
    CHECK(effective_gamma20(kerr_atom()) == doctest::Approx(mhz(142)));
}

TEST_CASE("liouvillian: trace preserving") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        const auto [a, d] = random_consistent_point(rng, k % 2 == 0);
        const Liouvillian l = build_liouvillian(a, d);
        CHECK((trace_functional() * l).cwiseAbs().maxCoeff() < 1e-10);
        const Matrix3c mixed = Matrix3c::Identity() / 3.0;
        CHECK(std::abs(apply(l, mixed).trace()) < 1e-14 * l.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("liouvillian: generic Kronecker builder reproduces a single decay") {
    AtomParams a = bare_atom();
    a.gamma_rel_10 = mhz(50);
    a.gamma_coh_10 = mhz(25);
    a.gamma_coh_21 = mhz(25);
    a.model = DephasingModel::dephasing_operator;
    DriveParams d;
    d.omega_p = a.omega01;
    d.omega_c = a.omega12;
    const std::vector<Matrix3c> jumps = {std::sqrt(a.gamma_rel_10) * ket_bra(0, 1)};
    const Liouvillian generic = lindblad_superoperator(build_hamiltonian(a, d), jumps);
    CHECK((generic - build_liouvillian(a, d)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("validate: rejects unphysical inputs") {
    AtomParams a = map_atom();
    a.gamma_coh_10 = -1.0;
    CHECK_THROWS_AS(validate(a), InvalidRates);
    a = map_atom();
    a.omega12 = a.omega01 + 1.0;
    CHECK_THROWS_AS(validate(a), InvalidRates);
    a = kerr_atom();
    a.model = DephasingModel::dephasing_operator;
    CHECK_THROWS_AS(build_liouvillian(a, weak_probe(a)), InvalidRates);
    a.model = DephasingModel::direct_gamma;
    CHECK_NOTHROW(build_liouvillian(a, weak_probe(a)));
}

TEST_CASE("steady state: undriven atom relaxes to the ground state") {
    const AtomParams a = kerr_atom();
    DriveParams d;
    d.omega_p = a.omega01;
    d.omega_c = a.omega12;
    const DensityMatrix rho = steady_state(build_liouvillian(a, d));
    CHECK(std::abs(rho(0, 0) - 1.0) < 1e-12);
    CHECK(max_abs(rho.matrix() - ket_bra(0, 0)) < 1e-12);
}

TEST_CASE("steady state: two-level limit matches the Bloch solution") {
    AtomParams a = map_atom();
    a.gamma_coh_10 = a.gamma_rel_10 / 2;
    for (double rabi_mhz : {1.0, 30.0, 100.0, 400.0}) {
        DriveParams d = weak_probe(a);
        d.rabi_p = mhz(rabi_mhz);
        const DensityMatrix rho = steady_state(build_liouvillian(a, d));
        const double g = a.gamma_coh_10;
        const Complex expected = Complex(0, -1) * d.rabi_p / (2 * g) /
                                 (1 + d.rabi_p * d.rabi_p / (a.gamma_rel_10 * g));
        CHECK(std::abs(rho.probe_coherence() - expected) < 1e-10);
        CHECK(std::abs(rho(0, 1) - std::conj(expected)) < 1e-10);
    }
}

TEST_CASE("steady state: invariants hold and residual is small") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 200; ++k) {
        const auto [a, d] = random_consistent_point(rng, k % 2 == 0);
        const Liouvillian l = build_liouvillian(a, d);
        const DensityMatrix rho = steady_state(l);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        CHECK(rho.hermiticity_error() < 1e-10);
        CHECK(rho.min_eigenvalue() > -1e-8);
        const Liouvillian scaled = l / l.cwiseAbs().maxCoeff();
        CHECK((scaled * rho.vectorized()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("steady state: non-unique fixed point is reported") {
    const AtomParams a = bare_atom();
    DriveParams d;
    d.omega_p = a.omega01;
    d.omega_c = a.omega12;
    CHECK_THROWS_AS(steady_state(build_liouvillian(a, d)), SingularSystem);
    // Level 2 decouples when nothing populates or drains it.
    AtomParams b = map_atom();
    b.gamma_rel_21 = 0.0;
    b.gamma_coh_21 = 0.0;
    CHECK_THROWS_AS(steady_state(build_liouvillian(b, weak_probe(b))), SingularSystem);
}

TEST_CASE("transmission: no coherence means full transmission") {
    const AtomParams a = map_atom();
    const DriveParams d = weak_probe(a);
    const TransmissionPoint p = transmission(a, d, DensityMatrix());
    CHECK(p.t == Complex(1.0, 0.0));
    CHECK(p.r == Complex(0.0, 0.0));
}

TEST_CASE("transmission: zero probe is rejected") {
    const AtomParams a = map_atom();
    DriveParams d = weak_probe(a);
    d.rabi_p = 0.0;
    CHECK_THROWS_AS(transmission(a, d, DensityMatrix()), ZeroProbe);
}

TEST_CASE("transmission: extinction without pure dephasing") {
    AtomParams a = map_atom();
    a.gamma_coh_10 = a.gamma_rel_10 / 2;
    const DriveParams d = weak_probe(a);
    const TransmissionPoint p = transmission(a, d, steady_state(build_liouvillian(a, d)));
    CHECK(p.magnitude() < 1e-3);
}

TEST_CASE("transmission: residual transmission set by dephasing over relaxation") {
    AtomParams a = map_atom();
    for (double f : {0.1, 0.5, 1.0, 2.0}) {
        const double phi = f * a.gamma_rel_10 / 2;
        a.gamma_coh_10 = a.gamma_rel_10 / 2 + phi;
        const DriveParams d = weak_probe(a);
        const TransmissionPoint p = transmission(a, d, steady_state(build_liouvillian(a, d)));
        const double expected = phi / (a.gamma_rel_10 / 2 + phi);
        // Weak but finite probe: saturation correction of order Ω²/(Γγ) ~ 1e-4.
        CHECK(std::abs(p.magnitude() - expected) < 1e-3 * expected + 1e-6);
    }
}

TEST_CASE("transmission: two-level reduction matches the analytic line shape") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        auto [a, d] = random_consistent_point(rng, false);
        d.rabi_c = 0.0;
        a.gamma_coh_21 = mhz(500 * u(rng));
        a.gamma_coh_20 = mhz(500 * u(rng));
        const TransmissionPoint p = transmission(a, d, steady_state(build_liouvillian(a, d)));
        const Complex expected =
            two_level_t(a.gamma_rel_10, a.gamma_coh_10, d.omega_p - a.omega01, d.rabi_p);
        CHECK(std::abs(p.t - expected) < 1e-9);
        CHECK(p.t == 1.0 + p.r);
    }
}

TEST_CASE("transmission: passive scatterer") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 200; ++k) {
        const auto [a, d] = random_consistent_point(rng, k % 2 == 0);
        const TransmissionPoint p = transmission(a, d, steady_state(build_liouvillian(a, d)));
        CHECK(p.magnitude() <= 1.0 + 1e-9);
        CHECK(p.t == 1.0 + p.r);
    }
}

TEST_CASE("phase helpers") {
    CHECK(wrap_degrees(180.0) == doctest::Approx(180.0));
    CHECK(wrap_degrees(-180.0) == doctest::Approx(180.0));
    CHECK(wrap_degrees(190.0) == doctest::Approx(-170.0));
    CHECK(wrap_degrees(-540.0) == doctest::Approx(180.0));
    const Complex on = std::polar(1.0, (179.0) * std::numbers::pi / 180);
    const Complex off = std::polar(1.0, (-179.0) * std::numbers::pi / 180);
    CHECK(phase_difference_deg(on, off) == doctest::Approx(-2.0));
    TransmissionPoint p;
    p.t = Complex(0.0, 1.0);
    CHECK(p.phase_deg() == doctest::Approx(90.0));
}

TEST_CASE("circuit decay rate") {
    const double w = ghz(7.1);
    CHECK(gamma10_from_circuit(w, 0.0, 50.0, 50e-15) == 0.0);
    const double g1 = gamma10_from_circuit(w, 2e-15, 50.0, 50e-15);
    CHECK(gamma10_from_circuit(w, 4e-15, 50.0, 50e-15) == doctest::Approx(4 * g1).epsilon(1e-14));
    // Invert for the coupling capacitance that gives 74 MHz.
    const double target = mhz(74);
    const double cc = std::sqrt(4 * 50e-15 * target / (w * w * 50.0));
    CHECK(std::abs(gamma10_from_circuit(w, cc, 50.0, 50e-15) / target - 1) < 1e-12);
    CHECK_THROWS_AS(gamma10_from_circuit(0.0, cc, 50.0, 50e-15), NonPositive);
    CHECK_THROWS_AS(gamma10_from_circuit(w, cc, 0.0, 50e-15), NonPositive);
    CHECK_THROWS_AS(gamma10_from_circuit(w, cc, 50.0, -1.0), NonPositive);
    CHECK_THROWS_AS(gamma10_from_circuit(w, -cc, 50.0, 50e-15), NonPositive);
}

TEST_CASE("density matrix accessors") {
    const DensityMatrix two = DensityMatrix::basis_state(2);
    CHECK(two(2, 2) == Complex(1.0, 0.0));
    CHECK(two.vectorized()(vec_index(2, 2)) == Complex(1.0, 0.0));
    Vector9c v = Vector9c::Zero();
    v(vec_index(1, 0)) = Complex(0.25, 0.5);
    CHECK(DensityMatrix::from_vector(v)(1, 0) == Complex(0.25, 0.5));
    CHECK(DensityMatrix().min_eigenvalue() == doctest::Approx(0.0));
}
