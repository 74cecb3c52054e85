#include "xkerr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "xkerr/calibration.hpp"
#include "xkerr/constants.hpp"

namespace xkerr {

namespace {

using constants::angular;

void require_monotone(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw InputError(std::string(name) + " grid is empty");
    if (grid.size() < 2) return;
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const bool ok = up ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
        if (!ok) throw InputError(std::string(name) + " grid must be strictly monotone");
    }
}

struct OperatingPoint {
    DriveParams on;
    DriveParams off;
};

OperatingPoint kerr_drives(const AtomParams& atom, const ProbeSetup& probe, double control_photons) {
    OperatingPoint op;
    op.off.omega_p = atom.omega01 + angular(probe.detuning_hz);
    op.off.omega_c = atom.omega12 + angular(probe.control_detuning_hz);
    op.off.rabi_p = probe_rabi_from_photons(probe.mean_photons, op.off.omega_p, atom.gamma_rel_10);
    op.off.rabi_c = 0.0;
    op.on = op.off;
    op.on.rabi_c = control_rabi_from_photons(control_photons, op.on.omega_c, atom.gamma_rel_10,
                                             atom.gamma_rel_21);
    return op;
}

TransmissionPoint solve_point(const AtomParams& atom, const DriveParams& drive,
                              const SteadyStateOptions& solver) {
    return transmission(atom, drive, steady_state(build_liouvillian(atom, drive), solver));
}

double vertex(double x0, double x1, double x2, double f0, double f1, double f2) {
    const double p = (x1 - x0) * (f1 - f2);
    const double q = (x1 - x2) * (f1 - f0);
    const double den = p - q;
    if (den == 0.0) return x1;
    return x1 - 0.5 * ((x1 - x0) * p - (x1 - x2) * q) / den;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

SweepResult sweep_map(const SweepSpec& spec) {
    require_monotone(spec.probe_freqs_hz, "probe frequency");
    require_monotone(spec.powers_dbm, "power");
    validate(spec.atom);

    const AtomParams& atom = spec.atom;
    const double omega_c = spec.control_freq_hz ? angular(*spec.control_freq_hz) : atom.omega12;

    SweepResult result;
    result.spec = spec;
    const std::size_t cols = spec.probe_freqs_hz.size();
    result.points.resize(spec.powers_dbm.size() * cols);

    detail::parallel_for(result.points.size(), spec.threads, [&](std::size_t idx) {
        const std::size_t row = idx / cols;
        const std::size_t col = idx % cols;
        SweepPoint& pt = result.points[idx];
        pt.probe_freq_hz = spec.probe_freqs_hz[col];
        pt.power_dbm = spec.powers_dbm[row];
        const double probe_dbm = spec.axis == PowerAxis::probe ? pt.power_dbm : spec.probe_power_dbm;
        const double control_dbm =
            spec.axis == PowerAxis::control ? pt.power_dbm : spec.control_power_dbm;

        DriveParams off;
        off.omega_p = angular(pt.probe_freq_hz);
        off.omega_c = omega_c;
        off.rabi_p = rabi_from_power(dbm_to_watts(probe_dbm), off.omega_p, atom.gamma_rel_10,
                                     Tone::probe);
        DriveParams on = off;
        if (spec.control_on)
            on.rabi_c =
                rabi_from_power(dbm_to_watts(control_dbm), omega_c, atom.gamma_rel_10, Tone::control);
        try {
            pt.on = solve_point(atom, on, spec.solver);
            pt.off = solve_point(atom, off, spec.solver);
        } catch (const SingularSystem& e) {
            std::ostringstream msg;
            msg << e.what() << " at power row " << row << " (" << pt.power_dbm
                << " dBm), frequency column " << col << " (" << pt.probe_freq_hz << " Hz)";
            throw SweepPointFailure(msg.str(), row, col);
        }
        pt.delta_t = pt.on.magnitude() - pt.off.magnitude();
        pt.delta_phi_deg = phase_difference_deg(pt.on.t, pt.off.t);
    });
    return result;
}

double autler_townes_splitting(const SweepResult& result, std::size_t power_row) {
    if (power_row >= result.rows()) throw InputError("power row out of range");
    const std::size_t n = result.cols();
    std::vector<double> mag(n), freq(n);
    for (std::size_t c = 0; c < n; ++c) {
        mag[c] = result.at(power_row, c).on.magnitude();
        freq[c] = result.at(power_row, c).probe_freq_hz;
    }
    std::vector<std::size_t> minima;
    for (std::size_t c = 1; c + 1 < n; ++c)
        if (mag[c] < mag[c - 1] && mag[c] <= mag[c + 1]) minima.push_back(c);
    if (minima.size() < 2) {
        std::ostringstream msg;
        msg << "row " << power_row << " has " << minima.size() << " transmission minimum(s)";
        throw NoDoublet(msg.str());
    }
    std::sort(minima.begin(), minima.end(),
              [&](std::size_t a, std::size_t b) { return mag[a] < mag[b]; });
    auto refine = [&](std::size_t c) {
        return vertex(freq[c - 1], freq[c], freq[c + 1], mag[c - 1], mag[c], mag[c + 1]);
    };
    return std::abs(refine(minima[0]) - refine(minima[1]));
}

KerrPoint kerr_point(const AtomParams& atom, const ProbeSetup& probe, double control_photons,
                     const SteadyStateOptions& solver) {
    const OperatingPoint op = kerr_drives(atom, probe, control_photons);
    KerrPoint pt;
    pt.control_photons = control_photons;
    pt.on = solve_point(atom, op.on, solver);
    pt.off = solve_point(atom, op.off, solver);
    pt.delta_phi_deg = phase_difference_deg(pt.on.t, pt.off.t);
    return pt;
}

KerrResult kerr_slope(const AtomParams& atom, const ProbeSetup& probe,
                      const std::vector<double>& photon_grid, const SteadyStateOptions& solver) {
    if (photon_grid.empty()) throw InputError("photon grid is empty");
    KerrResult result;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (double n : photon_grid) {
        KerrPoint pt = kerr_point(atom, probe, n, solver);
        sxy += n * pt.delta_phi_deg;
        sxx += n * n;
        syy += pt.delta_phi_deg * pt.delta_phi_deg;
        result.points.push_back(pt);
    }
    result.slope_deg_per_photon = sxx > 0.0 ? sxy / sxx : 0.0;
    double sr = 0.0;
    for (const KerrPoint& pt : result.points) {
        const double res = pt.delta_phi_deg - result.slope_deg_per_photon * pt.control_photons;
        sr += res * res;
    }
    result.relative_rms_residual = syy > 0.0 ? std::sqrt(sr / syy) : 0.0;
    return result;
}

SaturationResult saturation_scan(const AtomParams& atom, double detuning_hz, double control_photons,
                                 const std::vector<double>& probe_power_dbm, double tail_decades,
                                 const SteadyStateOptions& solver) {
    require_monotone(probe_power_dbm, "probe power");
    if (!(tail_decades > 0.0)) throw InputError("tail_decades must be positive");

    ProbeSetup probe;
    probe.detuning_hz = detuning_hz;
    const OperatingPoint base = kerr_drives(atom, probe, control_photons);

    SaturationResult result;
    const double top = *std::max_element(probe_power_dbm.begin(), probe_power_dbm.end());
    result.tail_start_dbm = top - 10.0 * tail_decades;

    std::vector<double> tail_p, tail_v, tail_phi, tail_q;
    for (double dbm : probe_power_dbm) {
        const double watts = dbm_to_watts(dbm);
        DriveParams on = base.on, off = base.off;
        on.rabi_p = off.rabi_p = rabi_from_power(watts, on.omega_p, atom.gamma_rel_10, Tone::probe);
        const DensityMatrix rho_on = steady_state(build_liouvillian(atom, on), solver);
        const DensityMatrix rho_off = steady_state(build_liouvillian(atom, off), solver);
        const TransmissionPoint t_on = transmission(atom, on, rho_on);
        const TransmissionPoint t_off = transmission(atom, off, rho_off);

        SaturationPoint pt;
        pt.probe_power_dbm = dbm;
        pt.probe_photons = probe_photon_number(watts, on.omega_p, atom.gamma_rel_10);
        pt.phase_on_deg = t_on.phase_deg();
        pt.phase_off_deg = t_off.phase_deg();
        pt.delta_phi_deg = phase_difference_deg(t_on.t, t_off.t);
        pt.delta_quadrature = (rho_on.probe_coherence() - rho_off.probe_coherence()).imag();
        result.points.push_back(pt);

        if (dbm >= result.tail_start_dbm) {
            tail_p.push_back(watts);
            tail_v.push_back(std::sqrt(watts));
            tail_phi.push_back(pt.delta_phi_deg);
            tail_q.push_back(pt.delta_quadrature);
        }
    }
    if (tail_p.size() < 3) throw InputError("saturation tail needs at least three grid points");
    result.phase_power_exponent = log_log_slope(tail_p, tail_phi);
    result.quadrature_amplitude_exponent = log_log_slope(tail_v, tail_q);
    return result;
}

double pulse_envelope(const PulseSpec& pulse, double t) {
    const double t0 = pulse.start_s;
    const double t1 = pulse.start_s + pulse.duration_s;
    if (t < t0) return 0.0;
    if (pulse.rise_s > 0.0) {
        if (t < t0 + pulse.rise_s) return (t - t0) / pulse.rise_s;
        if (t >= t1) return std::max(0.0, 1.0 - (t - t1) / pulse.rise_s);
        return 1.0;
    }
    return t < t1 ? 1.0 : 0.0;
}

PulseResult pulse_response(const AtomParams& atom, const PulseSpec& pulse, const OdeOptions& ode) {
    if (!(pulse.duration_s > 0.0)) throw InputError("pulse duration must be positive");
    if (!(pulse.rise_s >= 0.0)) throw InputError("pulse rise time must be non-negative");
    if (pulse.rise_s > pulse.duration_s) throw InputError("pulse rise time exceeds its duration");
    const std::vector<double>& times = pulse.times_s;
    if (times.empty() || !(times.front() < pulse.start_s))
        throw InputError("pulse time grid needs samples before the pulse starts");

    const OperatingPoint op = kerr_drives(atom, pulse.probe, pulse.control_photons);
    const Liouvillian l_off = build_liouvillian(atom, op.off);
    const Liouvillian l_delta = build_liouvillian(atom, op.on) - l_off;
    const DensityMatrix rho0 = steady_state(l_off);

    // The envelope is linear between kinks; integrate segment by segment so
    // no stage samples the wrong side of a discontinuity.
    const double t0 = pulse.start_s, t1 = pulse.start_s + pulse.duration_s;
    std::vector<double> cuts = {times.front(), times.back()};
    for (double b : {t0, t0 + pulse.rise_s, t1, t1 + pulse.rise_s})
        if (b > times.front() && b < times.back()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    PulseResult result;
    result.times_s = times;
    DensityMatrix state = rho0;
    bool at_rest = true;
    std::size_t next = 0;
    auto record = [&](double t, const DensityMatrix& rho) {
        result.envelope.push_back(pulse_envelope(pulse, t));
        result.phase_deg.push_back(transmission(atom, op.on, rho).phase_deg());
    };
    record(times[next++], state);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const double e_lo = pulse_envelope(pulse, a + 0.25 * (b - a));
        const double e_hi = pulse_envelope(pulse, a + 0.75 * (b - a));
        const auto generator = [&, a, b, e_lo, e_hi](double t) -> Liouvillian {
            const double u = ((t - a) / (b - a) - 0.25) / 0.5;
            return l_off + (e_lo + (e_hi - e_lo) * u) * l_delta;
        };
        // Samples within rounding of a segment end are snapped onto it.
        const double tol = 1e-9 * (b - a);
        std::vector<double> seg = {a};
        std::vector<std::size_t> slot;
        const std::size_t first = next;
        while (next < times.size() && times[next] <= b + tol) {
            const double ts = times[next++];
            if (ts <= a + tol) {
                slot.push_back(0);
                continue;
            }
            const double snapped = b - ts <= tol ? b : ts;
            if (seg.back() != snapped) seg.push_back(snapped);
            slot.push_back(seg.size() - 1);
        }
        if (seg.back() != b) seg.push_back(b);
        // Until the control first acts the state is the steady state of the
        // generator, so it does not move.
        at_rest = at_rest && ((e_lo == 0.0 && e_hi == 0.0) || pulse.control_photons == 0.0);
        const std::vector<DensityMatrix> traj =
            at_rest ? std::vector<DensityMatrix>(seg.size(), state)
                    : time_evolve(TimeDependentLiouvillian(generator), state, seg, ode);
        for (std::size_t i = 0; i < slot.size(); ++i) record(times[first + i], traj[slot[i]]);
        state = traj.back();
    }

    const double ref = result.phase_deg.front();
    std::vector<double> pre, plateau;
    const double lo = t0 + 0.25 * pulse.duration_s, hi = t0 + 0.75 * pulse.duration_s;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double rel = wrap_degrees(result.phase_deg[i] - ref);
        if (times[i] < t0) pre.push_back(rel);
        if (times[i] >= lo && times[i] <= hi) plateau.push_back(rel);
    }
    if (plateau.empty()) throw InputError("pulse time grid has no samples in the central half");
    result.baseline_phase_deg = wrap_degrees(ref + mean(pre));
    result.plateau_deg = mean(plateau) - mean(pre);
    return result;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] != 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(std::abs(y[i])));
        }
    }
    if (lx.size() < 2) throw InputError("log-log fit needs two points with non-zero values");
    const double mx = mean(lx), my = mean(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw InputError("log-log fit needs distinct abscissae");
    return sxy / sxx;
}

}  // namespace xkerr
