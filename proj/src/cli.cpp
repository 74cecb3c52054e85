#include "xkerr/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xkerr/atom.hpp"
#include "xkerr/calibration.hpp"
#include "xkerr/config.hpp"
#include "xkerr/constants.hpp"
#include "xkerr/errors.hpp"
#include "xkerr/experiments.hpp"
#include "xkerr/fitting.hpp"
#include "xkerr/io.hpp"

namespace xkerr::cli {

using nlohmann::json;
using constants::angular;
using constants::ordinary;

namespace {

double to_mhz(double rad_per_s) { return ordinary(rad_per_s) * 1e-6; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config::ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Sink for --out / --summary style options: a file when a path is given,
// otherwise the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

// Options shared by every config-driven subcommand.
struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::string summary_path;
    std::optional<unsigned> threads;
    // Flag-driven overrides, applied after --set.
    std::vector<std::pair<std::string, json>> flags;

    void add(CLI::App* app, bool summary) {
        app->add_option("config", config_path, "JSON configuration file")->required();
        app->add_option("--set", overrides,
                        "Override a config field, e.g. --set atom.gamma_coh_10_mhz=80 (repeatable)");
        app->add_option("-o,--out", out_path, "Output file (default: stdout)");
        if (summary)
            app->add_option("--summary", summary_path,
                            "Summary JSON file (default: stderr)");
        app->add_option("--threads", threads, "Worker threads; overrides parallelism")
            ->check(CLI::PositiveNumber);
    }

    config::Config load() const {
        json doc = config::parse_json_text(read_file(config_path));
        for (const auto& o : overrides) config::apply_override(doc, o);
        for (const auto& [path, value] : flags) {
            json* node = &doc;
            std::stringstream ss(path);
            std::string part;
            std::vector<std::string> parts;
            while (std::getline(ss, part, '.')) parts.push_back(part);
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                json& next = (*node)[parts[i]];
                if (next.is_null()) next = json::object();
                node = &next;
            }
            (*node)[parts.back()] = value;
        }
        if (threads) doc["parallelism"] = *threads;
        return config::parse_config(doc);
    }
};

SteadyStateOptions steady_options(const config::Config& cfg) {
    return {cfg.solver.steady_residual};
}

double control_omega(const config::Config& cfg) {
    return cfg.drive.control_freq_hz ? angular(*cfg.drive.control_freq_hz) : cfg.atom.omega12;
}

double control_detuning_hz(const config::Config& cfg) {
    return cfg.drive.control_freq_hz ? *cfg.drive.control_freq_hz - ordinary(cfg.atom.omega12)
                                     : 0.0;
}

json transmission_json(const TransmissionPoint& p) {
    return {{"t_re", p.t.real()},  {"t_im", p.t.imag()},        {"abs_t", p.magnitude()},
            {"phase_deg", p.phase_deg()}, {"r_re", p.r.real()}, {"r_im", p.r.imag()}};
}

std::vector<double> linspace(double a, double b, int n) {
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

std::vector<double> sweep_frequencies(const config::Config& cfg) {
    if (!cfg.sweep.freqs_hz.empty()) return cfg.sweep.freqs_hz;
    const double c = cfg.sweep.center_hz.value_or(ordinary(cfg.atom.omega01));
    return linspace(c - cfg.sweep.span_hz, c + cfg.sweep.span_hz, cfg.sweep.points);
}

// --- steady ---------------------------------------------------------------

struct SteadyArgs {
    Common common;
    std::optional<double> probe_freq_ghz, probe_detuning_mhz, probe_photons, probe_power_dbm;
    std::optional<double> control_freq_ghz, control_photons, control_power_dbm;
};

int cmd_steady(SteadyArgs& a, std::ostream& out) {
    auto& flags = a.common.flags;
    if (a.probe_freq_ghz) flags.emplace_back("drive.probe_freq_ghz", *a.probe_freq_ghz);
    if (a.probe_photons) flags.emplace_back("drive.probe_photons", *a.probe_photons);
    if (a.probe_power_dbm) flags.emplace_back("drive.probe_power_dbm", *a.probe_power_dbm);
    if (a.control_freq_ghz) flags.emplace_back("drive.control_freq_ghz", *a.control_freq_ghz);
    if (a.control_photons) flags.emplace_back("drive.control_photons", *a.control_photons);
    if (a.control_power_dbm) flags.emplace_back("drive.control_power_dbm", *a.control_power_dbm);
    const config::Config cfg = a.common.load();

    double probe_hz = cfg.drive.probe_freq_hz.value_or(ordinary(cfg.atom.omega01));
    if (a.probe_detuning_mhz) probe_hz = ordinary(cfg.atom.omega01) + *a.probe_detuning_mhz * 1e6;

    DriveParams drive;
    drive.omega_p = angular(probe_hz);
    drive.omega_c = control_omega(cfg);
    const double p_dbm = config::probe_power_dbm(cfg, drive.omega_p);
    const double c_dbm = config::control_power_dbm(cfg, drive.omega_c);
    drive.rabi_p = rabi_from_power(dbm_to_watts(p_dbm), drive.omega_p, cfg.atom.gamma_rel_10,
                                   Tone::probe);
    drive.rabi_c = rabi_from_power(dbm_to_watts(c_dbm), drive.omega_c, cfg.atom.gamma_rel_10,
                                   Tone::control);

    const auto solve = [&](const DriveParams& d) {
        const DensityMatrix rho = steady_state(build_liouvillian(cfg.atom, d), steady_options(cfg));
        return std::make_pair(rho, transmission(cfg.atom, d, rho));
    };
    const auto [rho, on] = solve(drive);
    DriveParams off_drive = drive;
    off_drive.rabi_c = 0.0;
    const auto off = solve(off_drive).second;

    json j = transmission_json(on);
    j["probe_freq_hz"] = probe_hz;
    j["probe_power_dbm"] = p_dbm;
    j["probe_photons"] = probe_photon_number(dbm_to_watts(p_dbm), drive.omega_p,
                                             cfg.atom.gamma_rel_10);
    j["control_power_dbm"] = std::isfinite(c_dbm) ? json(c_dbm) : json("off");
    j["control_photons"] = control_photon_number(dbm_to_watts(c_dbm), drive.omega_c,
                                                 cfg.atom.gamma_rel_21);
    j["populations"] = {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real()};
    j["control_off"] = transmission_json(off);
    j["dt"] = on.magnitude() - off.magnitude();
    j["dphi_deg"] = phase_difference_deg(on.t, off.t);

    Sink sink(a.common.out_path, out);
    *sink << j.dump(2) << '\n';
    return kExitOk;
}

// --- sweep ----------------------------------------------------------------

SweepSpec sweep_spec(const config::Config& cfg) {
    SweepSpec spec;
    spec.atom = cfg.atom;
    spec.probe_freqs_hz = sweep_frequencies(cfg);
    spec.powers_dbm = cfg.sweep.powers_dbm;
    spec.axis = PowerAxis::control;
    spec.probe_power_dbm = config::probe_power_dbm(cfg, cfg.atom.omega01);
    spec.control_freq_hz = cfg.drive.control_freq_hz;
    spec.control_on = cfg.sweep.control_on;
    spec.threads = cfg.parallelism;
    spec.solver = steady_options(cfg);
    return spec;
}

int cmd_sweep(Common& c, std::ostream& out, std::ostream& err) {
    const config::Config cfg = c.load();
    const SweepResult result = sweep_map(sweep_spec(cfg));

    Sink sink(c.out_path, out);
    *sink << "freq_hz,power_dbm,ton_re,ton_im,toff_re,toff_im,dt,dphi_deg\n";
    const SweepPoint* best = nullptr;
    for (const SweepPoint& p : result.points) {
        io::write_csv_row(*sink, {p.probe_freq_hz, p.power_dbm, p.on.t.real(), p.on.t.imag(),
                                  p.off.t.real(), p.off.t.imag(), p.delta_t, p.delta_phi_deg});
        if (!best || p.delta_phi_deg > best->delta_phi_deg) best = &p;
    }

    json j = {{"rows", result.rows()}, {"cols", result.cols()}};
    if (best) {
        j["max_dphi_deg"] = best->delta_phi_deg;
        j["max_dphi_freq_hz"] = best->probe_freq_hz;
        j["max_dphi_power_dbm"] = best->power_dbm;
        j["max_dphi_dt"] = best->delta_t;
    }
    Sink summary(c.summary_path, err);
    *summary << j.dump(2) << '\n';
    return kExitOk;
}

// --- kerr -----------------------------------------------------------------

ProbeSetup probe_setup(const config::Config& cfg, double detuning_hz) {
    ProbeSetup probe;
    probe.detuning_hz = detuning_hz;
    probe.mean_photons = cfg.drive.probe_photons;
    if (cfg.drive.probe_power_dbm) {
        const double omega_p = cfg.atom.omega01 + angular(detuning_hz);
        probe.mean_photons = probe_photon_number(dbm_to_watts(*cfg.drive.probe_power_dbm), omega_p,
                                                 cfg.atom.gamma_rel_10);
    }
    probe.control_detuning_hz = control_detuning_hz(cfg);
    return probe;
}

int cmd_kerr(Common& c, std::ostream& out, std::ostream& err) {
    const config::Config cfg = c.load();
    const ProbeSetup probe = probe_setup(cfg, cfg.kerr.detuning_hz);
    const KerrResult result = kerr_slope(cfg.atom, probe, cfg.kerr.photons, steady_options(cfg));

    Sink sink(c.out_path, out);
    *sink << "n_c,dphi_deg,ton_re,ton_im,toff_re,toff_im\n";
    for (const KerrPoint& p : result.points)
        io::write_csv_row(*sink, {p.control_photons, p.delta_phi_deg, p.on.t.real(),
                                  p.on.t.imag(), p.off.t.real(), p.off.t.imag()});

    const json j = {{"slope_deg_per_photon", result.slope_deg_per_photon},
                    {"relative_rms_residual", result.relative_rms_residual},
                    {"detuning_hz", probe.detuning_hz},
                    {"probe_photons", probe.mean_photons}};
    Sink summary(c.summary_path, err);
    *summary << j.dump(2) << '\n';
    return kExitOk;
}

// --- saturation -----------------------------------------------------------

int cmd_saturation(Common& c, std::ostream& out, std::ostream& err) {
    const config::Config cfg = c.load();
    const auto& s = cfg.saturation;
    const SaturationResult result =
        saturation_scan(cfg.atom, s.detuning_hz, s.control_photons,
                        linspace(s.power_start_dbm, s.power_stop_dbm, s.power_points),
                        s.tail_decades, steady_options(cfg));

    Sink sink(c.out_path, out);
    *sink << "p_p_dbm,dphi_deg,n_p,phase_on_deg,phase_off_deg,delta_q\n";
    for (const SaturationPoint& p : result.points)
        io::write_csv_row(*sink, {p.probe_power_dbm, p.delta_phi_deg, p.probe_photons,
                                  p.phase_on_deg, p.phase_off_deg, p.delta_quadrature});

    const json j = {{"phase_power_exponent", result.phase_power_exponent},
                    {"quadrature_amplitude_exponent", result.quadrature_amplitude_exponent},
                    {"tail_start_dbm", result.tail_start_dbm}};
    Sink summary(c.summary_path, err);
    *summary << j.dump(2) << '\n';
    return kExitOk;
}

// --- pulse ----------------------------------------------------------------

int cmd_pulse(Common& c, std::ostream& out, std::ostream& err) {
    const config::Config cfg = c.load();
    const auto& pc = cfg.pulse;
    PulseSpec pulse;
    pulse.start_s = pc.start_s;
    pulse.duration_s = pc.duration_s;
    pulse.rise_s = pc.rise_s;
    pulse.control_photons = pc.control_photons;
    pulse.probe = probe_setup(cfg, pc.detuning_hz);
    pulse.times_s = linspace(0.0, pc.stop_s, pc.samples);

    OdeOptions ode;
    ode.rtol = cfg.solver.rtol;
    ode.atol = cfg.solver.atol;
    const PulseResult result = pulse_response(cfg.atom, pulse, ode);
    const KerrPoint steady =
        kerr_point(cfg.atom, pulse.probe, pc.control_photons, steady_options(cfg));

    Sink sink(c.out_path, out);
    *sink << "t_s,phase_deg,envelope\n";
    for (std::size_t i = 0; i < result.times_s.size(); ++i)
        io::write_csv_row(*sink, {result.times_s[i], result.phase_deg[i], result.envelope[i]});

    const json j = {{"plateau_deg", result.plateau_deg},
                    {"baseline_phase_deg", result.baseline_phase_deg},
                    {"steady_dphi_deg", steady.delta_phi_deg}};
    Sink summary(c.summary_path, err);
    *summary << j.dump(2) << '\n';
    return kExitOk;
}

// --- fit / synth ----------------------------------------------------------

ModelParams model_from_config(const config::Config& cfg) {
    ModelParams m;
    m.atom = cfg.atom;
    m.tie_gamma21 = cfg.gamma21_from_dipole_ratio;
    return m;
}

MeasurementSetup measurement_setup(const config::Config& cfg) {
    MeasurementSetup setup;
    setup.probe_power_dbm = config::probe_power_dbm(cfg, cfg.atom.omega01);
    setup.control_freq_hz = cfg.drive.control_freq_hz;
    return setup;
}

int cmd_fit(Common& c, const std::string& data_path, std::ostream& out) {
    const config::Config cfg = c.load();
    std::ifstream in(data_path);
    if (!in) throw InputError("cannot open dataset '" + data_path + "'");
    const Dataset data = io::read_dataset_csv(in);

    FitSpec spec;
    spec.free = cfg.fit.free;
    spec.initial = model_from_config(cfg);
    for (const auto& [p, v] : cfg.fit.initial) spec.initial.set(p, v);
    spec.setup = measurement_setup(cfg);
    spec.bounds = cfg.fit.bounds;
    spec.max_iterations = cfg.fit.max_iterations;
    spec.ftol = cfg.fit.ftol;
    spec.xtol = cfg.fit.xtol;
    spec.gtol = cfg.fit.gtol;
    spec.restarts = cfg.fit.restarts;
    spec.restart_spread = cfg.fit.restart_spread;
    spec.seed = cfg.fit.seed;
    spec.space = cfg.fit.space;
    spec.threads = cfg.parallelism;
    spec.solver = steady_options(cfg);

    const FitReport report = fit(data, spec);
    json params = json::object();
    json stderrs = json::object();
    for (FitParam p : kAllFitParams)
        params[config::fit_param_key(p)] = config::fit_param_to_external(p, report.params.get(p));
    for (const auto& [p, s] : report.stderrs)
        stderrs[config::fit_param_key(p)] =
            p == FitParam::amplitude ? s : config::fit_param_to_external(p, s);
    const json j = {{"params", params},
                    {"stderr", stderrs},
                    {"residual_norm", report.residual_norm},
                    {"status", std::string(fit_status_name(report.status))},
                    {"iterations", report.iterations}};
    Sink sink(c.out_path, out);
    *sink << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_synth(Common& c, std::ostream& out) {
    const config::Config cfg = c.load();
    SynthesisGrid grid;
    grid.freqs_hz = sweep_frequencies(cfg);
    if (cfg.synth.include_control_off)
        grid.control_dbm.push_back(-std::numeric_limits<double>::infinity());
    for (double p : cfg.sweep.powers_dbm) grid.control_dbm.push_back(p);
    const Dataset data = synthesize(model_from_config(cfg), measurement_setup(cfg), grid,
                                    cfg.synth.sigma, cfg.synth.seed, cfg.synth.averages);
    Sink sink(c.out_path, out);
    io::write_dataset_csv(*sink, data);
    return kExitOk;
}

// --- calibrate ------------------------------------------------------------

struct CalibrateArgs {
    std::optional<double> dbm, watts, photons;
    std::optional<double> omega_c_ghz, gamma21_mhz, omega_p_ghz, gamma10_mhz;
    std::string tone;
    std::string out_path;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
    const int given = int(a.dbm.has_value()) + int(a.watts.has_value()) + int(a.photons.has_value());
    if (given != 1) throw InputError("give exactly one of --dbm, --watts, --photons");
    const bool control = a.omega_c_ghz && a.gamma21_mhz;
    const bool probe = a.omega_p_ghz && a.gamma10_mhz;
    if (a.omega_c_ghz.has_value() != a.gamma21_mhz.has_value())
        throw InputError("--omega-c-ghz and --gamma21-mhz must be given together");
    if (a.omega_p_ghz.has_value() != a.gamma10_mhz.has_value())
        throw InputError("--omega-p-ghz and --gamma10-mhz must be given together");
    if (!control && !probe)
        throw InputError("describe a tone with --omega-c-ghz/--gamma21-mhz or --omega-p-ghz/--gamma10-mhz");
    for (const auto& v : {a.omega_c_ghz, a.gamma21_mhz, a.omega_p_ghz, a.gamma10_mhz})
        if (v && !(*v > 0.0)) throw NonPositive("tone frequencies and rates must be positive");

    const double omega_c = a.omega_c_ghz ? constants::ghz(*a.omega_c_ghz) : 0.0;
    const double gamma21 = a.gamma21_mhz ? constants::mhz(*a.gamma21_mhz) : 0.0;
    const double omega_p = a.omega_p_ghz ? constants::ghz(*a.omega_p_ghz) : 0.0;
    const double gamma10 = a.gamma10_mhz ? constants::mhz(*a.gamma10_mhz) : 0.0;

    double watts = 0.0;
    if (a.dbm) watts = dbm_to_watts(*a.dbm);
    if (a.watts) watts = *a.watts;
    if (a.photons) {
        std::string tone = a.tone;
        if (tone.empty()) {
            if (control && probe)
                throw InputError("--photons with both tones needs --tone probe|control");
            tone = control ? "control" : "probe";
        }
        if (tone == "control" && control) watts = power_from_photon_number(*a.photons, omega_c, gamma21);
        else if (tone == "probe" && probe) watts = power_from_photon_number(*a.photons, omega_p, gamma10);
        else throw InputError("--tone " + tone + " has no frequency and rate given");
    }
    if (watts < 0.0) throw NonPositive("power must be non-negative");

    json j = {{"power_watts", watts}, {"power_dbm", watts_to_dbm(watts)}};
    if (control) {
        const PowerPoint pt = make_power_point(watts_to_dbm(watts), omega_c, gamma21);
        j["control"] = {{"photon_flux_per_s", pt.photon_flux}, {"mean_photons", pt.mean_photons}};
    }
    if (probe) {
        const PowerPoint pt = make_power_point(watts_to_dbm(watts), omega_p, gamma10);
        j["probe"] = {{"photon_flux_per_s", pt.photon_flux},
                      {"mean_photons", pt.mean_photons},
                      {"rabi_mhz", to_mhz(rabi_from_power(watts, omega_p, gamma10, Tone::probe))}};
        if (control)
            j["control"]["rabi_mhz"] =
                to_mhz(rabi_from_power(watts, omega_c, gamma10, Tone::control));
    }
    if (!std::isfinite(watts_to_dbm(watts))) j["power_dbm"] = "-inf";
    Sink sink(a.out_path, out);
    *sink << j.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady-state and pulsed simulation of a driven three-level artificial atom "
                 "in an open transmission line",
                 "xkerr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "xkerr 0.1.0");

    SteadyArgs steady;
    auto* s = app.add_subcommand("steady", "Steady-state transmission at one operating point");
    steady.common.add(s, false);
    s->add_option("--probe-freq,--probe-freq-ghz", steady.probe_freq_ghz,
                  "Probe frequency in GHz (config: drive.probe_freq_ghz)");
    s->add_option("--probe-detuning-mhz", steady.probe_detuning_mhz,
                  "Probe detuning from the 0-1 transition in MHz; overrides --probe-freq");
    s->add_option("--probe-photons", steady.probe_photons,
                  "Probe photons per interaction time (config: drive.probe_photons)");
    s->add_option("--probe-power-dbm", steady.probe_power_dbm,
                  "Probe line power in dBm (config: drive.probe_power_dbm)");
    s->add_option("--control-freq-ghz", steady.control_freq_ghz,
                  "Control frequency in GHz (config: drive.control_freq_ghz)");
    s->add_option("--control-photons", steady.control_photons,
                  "Control photons per interaction time (config: drive.control_photons)");
    s->add_option("--control-power-dbm", steady.control_power_dbm,
                  "Control line power in dBm (config: drive.control_power_dbm)");

    Common sweep, kerr, saturation, pulse, fitc, synth;
    sweep.add(app.add_subcommand("sweep", "Probe frequency by control power map, control on and off"),
              true);
    kerr.add(app.add_subcommand("kerr", "Cross-Kerr phase against control photon number"), true);
    saturation.add(app.add_subcommand("saturation", "Kerr phase against probe power"), true);
    pulse.add(app.add_subcommand("pulse", "Probe phase during a control pulse"), true);

    auto* f = app.add_subcommand("fit", "Fit atom parameters to a transmission dataset");
    fitc.add(f, false);
    std::string data_path;
    f->add_option("data", data_path, "Dataset CSV (freq_hz,power_dbm,t_re,t_im,weight)")
        ->required();

    synth.add(app.add_subcommand("synth", "Write a synthetic dataset on the sweep grid"), false);

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "Convert between dBm, watts and photon numbers");
    auto* o_dbm = c->add_option("--dbm", cal.dbm, "Line power in dBm");
    auto* o_watts = c->add_option("--watts", cal.watts, "Line power in W");
    auto* o_photons = c->add_option("--photons", cal.photons, "Photons per interaction time");
    o_dbm->excludes(o_watts)->excludes(o_photons);
    o_watts->excludes(o_photons);
    c->add_option("--omega-c-ghz", cal.omega_c_ghz, "Control frequency in GHz");
    c->add_option("--gamma21-mhz", cal.gamma21_mhz, "Relaxation rate 2->1 in MHz");
    c->add_option("--omega-p-ghz", cal.omega_p_ghz, "Probe frequency in GHz");
    c->add_option("--gamma10-mhz", cal.gamma10_mhz, "Relaxation rate 1->0 in MHz");
    c->add_option("--tone", cal.tone, "Tone that --photons refers to")
        ->check(CLI::IsMember({"probe", "control"}));
    c->add_option("-o,--out", cal.out_path, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (app.got_subcommand("steady")) return cmd_steady(steady, out);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep, out, err);
        if (app.got_subcommand("kerr")) return cmd_kerr(kerr, out, err);
        if (app.got_subcommand("saturation")) return cmd_saturation(saturation, out, err);
        if (app.got_subcommand("pulse")) return cmd_pulse(pulse, out, err);
        if (app.got_subcommand("fit")) return cmd_fit(fitc, data_path, out);
        if (app.got_subcommand("synth")) return cmd_synth(synth, out);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(cal, out);
    } catch (const SweepPointFailure& e) {
        err << "error: " << e.what() << " (row " << e.row() << ", column " << e.col() << ")\n";
        return kExitNumerical;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitInput;
}

}  // namespace xkerr::cli
