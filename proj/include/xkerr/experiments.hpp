#pragma once

// Measurement pipelines: probe-frequency by power maps with the control on
// and off, doublet analysis, Kerr slope, probe saturation and pulsed control.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "xkerr/atom.hpp"
#include "xkerr/errors.hpp"
#include "xkerr/evolve.hpp"

namespace xkerr {

/// Which tone the outer power axis of a sweep scans.
enum class PowerAxis { control, probe };

struct SweepSpec {
    AtomParams atom;
    std::vector<double> probe_freqs_hz;  // inner axis, absolute probe frequency
    std::vector<double> powers_dbm;      // outer axis
    PowerAxis axis = PowerAxis::control;
    /// Probe line power when the outer axis is the control.
    double probe_power_dbm = -160.0;
    /// Control line power when the outer axis is the probe.
    double control_power_dbm = -160.0;
    /// Absolute control frequency; resonant with the 1-2 transition if empty.
    std::optional<double> control_freq_hz;
    /// When false the "on" branch is evaluated without the control as well.
    bool control_on = true;
    unsigned threads = 1;
    SteadyStateOptions solver;
};

struct SweepPoint {
    double probe_freq_hz = 0.0;
    double power_dbm = 0.0;
    TransmissionPoint on;
    TransmissionPoint off;
    double delta_t = 0.0;        // |t_on| - |t_off|
    double delta_phi_deg = 0.0;  // arg t_on - arg t_off, unwrapped
};

struct SweepResult {
    SweepSpec spec;
    /// Row-major: power outer, frequency inner.
    std::vector<SweepPoint> points;

    std::size_t rows() const { return spec.powers_dbm.size(); }
    std::size_t cols() const { return spec.probe_freqs_hz.size(); }
    const SweepPoint& at(std::size_t row, std::size_t col) const {
        return points[row * cols() + col];
    }
};

/// Raised when a grid point of a sweep has no unique steady state.
class SweepPointFailure : public SingularSystem {
public:
    SweepPointFailure(const std::string& what, std::size_t row, std::size_t col)
        : SingularSystem(what), row_(row), col_(col) {}
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

SweepResult sweep_map(const SweepSpec& spec);

/// Frequency separation (Hz) of the two deepest local minima of |t_on| in
/// one row, each refined by a parabola through three samples. Throws
/// NoDoublet when the row has fewer than two minima.
double autler_townes_splitting(const SweepResult& result, std::size_t power_row);

struct ProbeSetup {
    double detuning_hz = 0.0;      // ω_p/2π - ω01/2π
    double mean_photons = 1e-4;    // ⟨N_p⟩
    /// Control detuning from the 1-2 transition.
    double control_detuning_hz = 0.0;
};

/// Control-on / control-off pair at one operating point.
struct KerrPoint {
    double control_photons = 0.0;
    TransmissionPoint on;
    TransmissionPoint off;
    double delta_phi_deg = 0.0;
};

KerrPoint kerr_point(const AtomParams& atom, const ProbeSetup& probe, double control_photons,
                     const SteadyStateOptions& solver = {});

struct KerrResult {
    double slope_deg_per_photon = 0.0;
    /// RMS of fit residuals divided by RMS of the signal.
    double relative_rms_residual = 0.0;
    std::vector<KerrPoint> points;
};

/// Zero-intercept least-squares line through (⟨N_c⟩, Δφ_p).
KerrResult kerr_slope(const AtomParams& atom, const ProbeSetup& probe,
                      const std::vector<double>& photon_grid,
                      const SteadyStateOptions& solver = {});

struct SaturationPoint {
    double probe_power_dbm = 0.0;
    double probe_photons = 0.0;
    double phase_on_deg = 0.0;
    double phase_off_deg = 0.0;
    double delta_phi_deg = 0.0;
    /// Im(<1|ρ|0>_on - <1|ρ|0>_off), the control-induced quadrature shift.
    double delta_quadrature = 0.0;
};

struct SaturationResult {
    std::vector<SaturationPoint> points;
    double tail_start_dbm = 0.0;
    /// Log-log slope of |Δφ_p| against P_p over the tail.
    double phase_power_exponent = 0.0;
    /// Log-log slope of |ΔQ| against V_in ∝ sqrt(P_p) over the tail.
    double quadrature_amplitude_exponent = 0.0;
};

/// Probe-power scan of the Kerr phase at fixed ⟨N_c⟩. The exponents are fitted
/// over the top `tail_decades` decades of probe power in the grid.
SaturationResult saturation_scan(const AtomParams& atom, double detuning_hz, double control_photons,
                                 const std::vector<double>& probe_power_dbm,
                                 double tail_decades = 1.0, const SteadyStateOptions& solver = {});

struct PulseSpec {
    double start_s = 0.0;
    /// Time from the start of the rise to the start of the fall.
    double duration_s = 0.0;
    /// Length of each linear ramp.
    double rise_s = 0.0;
    double control_photons = 0.0;
    ProbeSetup probe;
    std::vector<double> times_s;
};

double pulse_envelope(const PulseSpec& pulse, double t);

struct PulseResult {
    std::vector<double> times_s;
    std::vector<double> envelope;
    std::vector<double> phase_deg;
    double baseline_phase_deg = 0.0;
    /// Mean phase over the central half of the pulse minus the pre-pulse mean.
    double plateau_deg = 0.0;
};

/// Time-resolved probe phase while a control pulse is applied to the
/// control-off steady state.
PulseResult pulse_response(const AtomParams& atom, const PulseSpec& pulse,
                           const OdeOptions& ode = {});

/// Least-squares slope of log10|y| against log10 x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace xkerr
