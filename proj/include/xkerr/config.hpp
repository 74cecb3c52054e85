#pragma once

// JSON run configuration. External quantities are ordinary frequencies with
// explicit unit suffixes (*_ghz, *_mhz, *_ns, *_ff); everything is converted
// to rad/s and SI on load.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xkerr/atom.hpp"
#include "xkerr/errors.hpp"
#include "xkerr/fitting.hpp"

namespace xkerr::config {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid configuration; the message names the offending key.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

struct DriveConfig {
    std::optional<double> probe_freq_hz;
    double probe_photons = 1e-4;
    std::optional<double> probe_power_dbm;
    std::optional<double> control_freq_hz;
    double control_photons = 0.0;
    std::optional<double> control_power_dbm;
};

struct SweepConfig {
    std::optional<double> center_hz;  // ω01/2π when empty
    double span_hz = 150e6;           // half-width
    int points = 201;
    std::vector<double> freqs_hz;  // explicit grid, overrides center/span/points
    double power_start_dbm = -140.0;
    double power_stop_dbm = -108.0;
    int power_points = 17;
    std::vector<double> powers_dbm;
    bool control_on = true;
};

struct KerrConfig {
    double detuning_hz = 20e6;
    std::vector<double> photons;  // default 0.02 .. 0.5 in 25 steps
};

struct SaturationConfig {
    double detuning_hz = 20e6;
    double control_photons = 0.3;
    double power_start_dbm = -150.0;
    double power_stop_dbm = -70.0;
    int power_points = 81;
    double tail_decades = 1.0;
};

struct PulseConfig {
    double detuning_hz = 20e6;
    double control_photons = 0.3;
    double start_s = 20e-9;
    double duration_s = 100e-9;
    double rise_s = 0.0;
    double stop_s = 200e-9;
    int samples = 801;
};

struct FitConfig {
    std::vector<FitParam> free = {FitParam::gamma_rel_10, FitParam::gamma_coh_10,
                                  FitParam::gamma_coh_21};
    std::map<FitParam, double> initial;  // internal units
    std::map<FitParam, Bounds> bounds;   // internal units
    int max_iterations = 200;
    double ftol = 1e-12;
    double xtol = 1e-10;
    double gtol = 1e-12;
    int restarts = 1;
    double restart_spread = 0.3;
    std::uint64_t seed = 0;
    ResidualSpace space = ResidualSpace::complex;
};

struct SynthConfig {
    double sigma = 0.0;
    std::uint64_t seed = 1;
    int averages = 1;
    bool include_control_off = true;
};

struct SolverConfig {
    double rtol = 1e-9;
    double atol = 1e-12;
    double steady_residual = 1e-9;
};

struct Config {
    AtomParams atom;
    /// Γ21 was not given and follows 2 Γ10.
    bool gamma21_from_dipole_ratio = false;
    DriveConfig drive;
    SweepConfig sweep;
    KerrConfig kerr;
    SaturationConfig saturation;
    PulseConfig pulse;
    FitConfig fit;
    SynthConfig synth;
    SolverConfig solver;
    unsigned parallelism = 1;
};

/// Validates the document against the schema; unknown keys are rejected.
Config parse_config(const nlohmann::json& doc);
/// Parses JSON text; syntax errors report the last key read before them.
nlohmann::json parse_json_text(const std::string& text);
Config load_config_file(const std::string& path);

/// Applies "a.b.c=value" to a document. The value is parsed as JSON, or
/// taken as a string if that fails.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// External config key for a fit parameter, e.g. "gamma_rel_10_mhz".
std::string fit_param_key(FitParam p);
double fit_param_to_external(FitParam p, double internal);
double fit_param_from_external(FitParam p, double external);

/// Probe line power for a drive block: the explicit dBm value, or the power
/// carrying `probe_photons` at ω_p.
double probe_power_dbm(const Config& cfg, double omega_p);
/// Control line power for a drive block at ω_c.
double control_power_dbm(const Config& cfg, double omega_c);

}  // namespace xkerr::config
