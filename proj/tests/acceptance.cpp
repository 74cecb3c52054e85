// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "xkerr/calibration.hpp"
#include "xkerr/evolve.hpp"
#include "xkerr/experiments.hpp"
#include "xkerr/fitting.hpp"

using namespace xkerr;
using namespace xkerr::test;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

double probe_dbm_for(const AtomParams& a, double photons) {
    return watts_to_dbm(power_from_photon_number(photons, a.omega01, a.gamma_rel_10));
}

SweepSpec map_sweep(int points, std::vector<double> powers) {
    SweepSpec s;
    s.atom = map_atom();
    for (double o : linspace(-150e6, 150e6, points)) s.probe_freqs_hz.push_back(7.1e9 + o);
    s.powers_dbm = std::move(powers);
    s.probe_power_dbm = probe_dbm_for(s.atom, 1e-4);
    return s;
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome extinction() {
    AtomParams a = kerr_atom();
    a.gamma_coh_10 = a.gamma_rel_10 / 2;
    const DriveParams d = weak_probe(a, 0.0, 1e-4);
    const double t = transmission(a, d, steady_state(build_liouvillian(a, d))).magnitude();
    return {t < 1e-3, fmt("|t| = %.3e (limit 1e-3)", t)};
}

Outcome residual_law() {
    double worst = 0.0;
    for (double k : {0.1, 0.5, 1.0, 2.0}) {
        AtomParams a = kerr_atom();
        const double phi = k * a.gamma_rel_10 / 2;
        a.gamma_coh_10 = a.gamma_rel_10 / 2 + phi;
        // Weak enough that saturation stays below the tolerance.
        const DriveParams d = weak_probe(a, 0.0, 1e-6);
        const double t = transmission(a, d, steady_state(build_liouvillian(a, d))).magnitude();
        worst = std::max(worst, std::abs(t - phi / (a.gamma_rel_10 / 2 + phi)));
    }
    return {worst < 1e-6, fmt("max deviation %.3e (limit 1e-6, <N_p> = 1e-6)", worst)};
}

Outcome autler_townes() {
    const SweepResult r = sweep_map(map_sweep(601, {-116.0}));
    const double split = autler_townes_splitting(r, 0);
    const AtomParams a = r.spec.atom;
    const double rabi =
        rabi_from_power(dbm_to_watts(-116.0), a.omega12, a.gamma_rel_10, Tone::control) /
        constants::two_pi;
    const double dev = split / rabi - 1.0;
    return {std::abs(dev) < 0.05,
            fmt("splitting %.2f MHz vs Omega_c/2pi %.2f MHz, deviation %+.1f%% (limit 5%%)",
                split * 1e-6, rabi * 1e-6, 100 * dev)};
}

Outcome kerr() {
    ProbeSetup probe;
    probe.detuning_hz = 20e6;
    probe.mean_photons = 1e-4;
    const KerrResult k = kerr_slope(kerr_atom(), probe, linspace(0.02, 0.5, 25));
    const double s = k.slope_deg_per_photon;
    return {s >= 8.0 && s <= 14.0,
            fmt("slope %.2f deg/photon (window [8, 14]), relative rms residual %.3f", s,
                k.relative_rms_residual)};
}

Outcome dispersive_shift() {
    const SweepResult r = sweep_map(map_sweep(201, linspace(-140, -108, 17)));
    const SweepPoint* best = &r.points.front();
    const SweepPoint* best_flat = nullptr;
    for (const SweepPoint& p : r.points) {
        if (std::abs(p.delta_phi_deg) > std::abs(best->delta_phi_deg)) best = &p;
        if (std::abs(p.delta_t) < 0.05 &&
            (!best_flat || std::abs(p.delta_phi_deg) > std::abs(best_flat->delta_phi_deg)))
            best_flat = &p;
    }
    const bool pass = std::abs(best->delta_phi_deg) >= 25.0 && std::abs(best->delta_t) < 0.05;
    return {pass, fmt("max |dphi| %.2f deg at %.1f dBm, %+.1f MHz with |dt| = %.3f "
                      "(need >= 25 deg and |dt| < 0.05); largest with |dt| < 0.05 is %.2f deg",
                      std::abs(best->delta_phi_deg), best->power_dbm,
                      (best->probe_freq_hz - 7.1e9) * 1e-6, std::abs(best->delta_t),
                      best_flat ? std::abs(best_flat->delta_phi_deg) : 0.0)};
}

Outcome saturation() {
    const SaturationResult s = saturation_scan(kerr_atom(), 20e6, 0.3, linspace(-150, -70, 81), 1.0);
    const double ep = s.phase_power_exponent, eq = s.quadrature_amplitude_exponent;
    return {std::abs(ep + 2.0) <= 0.15 && std::abs(eq + 3.0) <= 0.2,
            fmt("dphi ~ P^%.3f (need -2 +- 0.15), dQ ~ V^%.3f (need -3 +- 0.2), tail from %.0f dBm",
                ep, eq, s.tail_start_dbm)};
}

Outcome calibration() {
    const double watts = dbm_to_watts(-121.4);
    const double n_c = control_photon_number(watts, ghz(6.38), mhz(170));
    const double n_p = probe_photon_number(dbm_to_watts(-122.0), ghz(7.26), mhz(140));
    return {std::abs(n_c - 1.0) <= 0.01 && std::abs(n_p - 1.0) <= 0.1,
            fmt("-121.4 dBm = %.3f fW -> <N_c> = %.4f (1 +- 0.01); -122 dBm -> <N_p> = %.4f (1 +- 0.1)",
                watts * 1e15, n_c, n_p)};
}

Outcome oracle_suite() {
    std::mt19937_64 rng(20240501);
    double worst_evolve = 0.0, worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0, worst_t = 0.0;
    int failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto [a, d] = random_consistent_point(rng, k % 2 == 1);
        const Liouvillian l = build_liouvillian(a, d);
        const DensityMatrix ss = steady_state(l);
        const double slowest = std::min({a.gamma_rel_10, a.gamma_rel_21, a.gamma_coh_10,
                                         a.gamma_coh_21, effective_gamma20(a)});
        const std::vector<double> grid = {0.0, 50.0 / slowest};
        const auto traj = time_evolve(l, DensityMatrix(), grid);
        const double diff = (traj.back().matrix() - ss.matrix()).cwiseAbs().maxCoeff();
        const double trace = std::abs(ss.trace() - 1.0);
        const double herm = ss.hermiticity_error();
        const Eigen::SelfAdjointEigenSolver<M3> eig(0.5 * (ss.matrix() + ss.matrix().adjoint()));
        const double neg = std::max(0.0, -eig.eigenvalues().minCoeff());
        const double t = transmission(a, d, ss).magnitude();
        worst_evolve = std::max(worst_evolve, diff);
        worst_trace = std::max(worst_trace, trace);
        worst_herm = std::max(worst_herm, herm);
        worst_eig = std::max(worst_eig, neg);
        worst_t = std::max(worst_t, t);
        if (!(diff < 1e-6 && trace < 1e-10 && herm < 1e-10 && neg < 1e-10 && t <= 1.0 + 1e-12))
            ++failures;
    }
    return {failures == 0,
            fmt("%d/1000 draws fail; worst |evolve - steady| %.2e (1e-6), trace %.1e, "
                "hermiticity %.1e, negative eigenvalue %.1e, max |t| %.6f",
                failures, worst_evolve, worst_trace, worst_herm, worst_eig, worst_t)};
}

Outcome fit_round_trip() {
    ModelParams truth;
    truth.atom = map_atom();
    truth.tie_gamma21 = true;
    MeasurementSetup setup;
    setup.probe_power_dbm = probe_dbm_for(truth.atom, 1e-4);
    SynthesisGrid grid;
    for (double o : linspace(-150e6, 150e6, 31)) grid.freqs_hz.push_back(7.1e9 + o);
    grid.control_dbm = linspace(-140, -108, 8);
    const std::vector<FitParam> free = {FitParam::gamma_rel_10, FitParam::gamma_coh_10,
                                        FitParam::gamma_coh_21};

    const Dataset noisy = synthesize(truth, setup, grid, 0.01, 2024);
    double worst = 0.0;
    int bad_starts = 0;
    std::string bad;
    for (int signs = 0; signs < 8; ++signs) {
        FitSpec spec;
        spec.free = free;
        spec.setup = setup;
        spec.initial = truth;
        for (int k = 0; k < 3; ++k) {
            const double f = (signs >> k) & 1 ? 1.3 : 0.7;
            spec.initial.set(free[k], f * truth.get(free[k]));
        }
        const FitReport report = fit(noisy, spec);
        double dev = 0.0;
        for (FitParam p : free)
            dev = std::max(dev, std::abs(report.values.at(p) / truth.get(p) - 1.0));
        worst = std::max(worst, dev);
        if (dev >= 0.05) {
            ++bad_starts;
            bad += fmt(" [start %.1f/%.1f/%.1f -> %.3f/%.3f/%.3f]",
                       spec.initial.get(free[0]) / truth.get(free[0]),
                       spec.initial.get(free[1]) / truth.get(free[1]),
                       spec.initial.get(free[2]) / truth.get(free[2]),
                       report.values.at(free[0]) / truth.get(free[0]),
                       report.values.at(free[1]) / truth.get(free[1]),
                       report.values.at(free[2]) / truth.get(free[2]));
        }
    }

    const Dataset clean = synthesize(truth, setup, grid, 0.0, 1);
    FitSpec exact;
    exact.free = free;
    exact.setup = setup;
    exact.initial = truth;
    const FitReport fixed = fit(clean, exact);
    double fixed_dev = 0.0;
    for (FitParam p : free)
        fixed_dev = std::max(fixed_dev, std::abs(fixed.values.at(p) / truth.get(p) - 1.0));

    const bool pass = worst < 0.05 && fixed.iterations <= 2 &&
                      fixed.status == FitStatus::converged && fixed_dev < 1e-9;
    return {pass, fmt("%d of 8 +-30%% corner starts outside 5%%, worst rate error %.2f%%%s; "
                      "zero-noise fit %d iteration(s), deviation %.1e",
                      bad_starts, 100 * worst, bad.c_str(), fixed.iterations, fixed_dev)};
}

Outcome pulse() {
    const AtomParams a = kerr_atom();
    PulseSpec p;
    p.start_s = 20e-9;
    p.duration_s = 100e-9;
    p.control_photons = 0.3;
    p.probe.detuning_hz = 20e6;
    p.times_s = linspace(0, 200e-9, 801);
    const PulseResult r = pulse_response(a, p);
    const double steady = kerr_point(a, p.probe, 0.3).delta_phi_deg;
    const double diff = r.plateau_deg - steady;
    return {std::abs(diff) < 0.1,
            fmt("plateau %.6f deg vs steady %.6f deg, difference %.2e (limit 0.1)", r.plateau_deg,
                steady, diff)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"extinction", extinction},
        {"residual transmission law", residual_law},
        {"Autler-Townes splitting", autler_townes},
        {"Kerr slope", kerr},
        {"maximum dispersive shift", dispersive_shift},
        {"saturation exponents", saturation},
        {"calibration anchors", calibration},
        {"oracle equivalence", oracle_suite},
        {"fit round trip", fit_round_trip},
        {"pulse plateau", pulse},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
