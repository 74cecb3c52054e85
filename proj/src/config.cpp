#include "xkerr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "xkerr/calibration.hpp"
#include "xkerr/constants.hpp"

namespace xkerr::config {

using nlohmann::json;
using constants::ghz;
using constants::mhz;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

// One JSON object of the schema. Every key read is recorded so that
// finish() can reject the rest.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    std::optional<double> number(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) fail(key_path(key), "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) fail(key_path(key), "must be finite");
        return d;
    }

    double number(const std::string& key, double fallback) {
        return number(key).value_or(fallback);
    }

    double required(const std::string& key) {
        const auto v = number(key);
        if (!v) fail(key_path(key), "required key is missing");
        return *v;
    }

    double positive(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) fail(key_path(key), "must be positive");
        return v;
    }

    double non_negative(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (v < 0.0) fail(key_path(key), "must be non-negative");
        return v;
    }

    long long integer(const std::string& key, long long fallback, long long min) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(key_path(key), "expected an integer");
        const long long n = v->get<long long>();
        if (n < min) fail(key_path(key), "must be at least " + std::to_string(min));
        return n;
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(key_path(key), "expected true or false");
        return v->get<bool>();
    }

    std::optional<std::string> string(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) fail(key_path(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, double scale = 1.0) {
        const json* v = find(key);
        if (!v) return {};
        if (!v->is_array()) fail(key_path(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>()))
                fail(key_path(key) + "[" + std::to_string(i) + "]", "expected a finite number");
            out.push_back(scale * e.get<double>());
        }
        return out;
    }

    std::optional<Block> child(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return Block(*v, key_path(key));
    }

    const json& raw() const { return j_; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) fail(key_path(key), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Block empty_block(const std::string& path) {
    static const json empty = json::object();
    return Block(empty, path);
}

Block block_or_empty(Block& parent, const std::string& key) {
    auto b = parent.child(key);
    return b ? std::move(*b) : empty_block(parent.key_path(key));
}

std::vector<double> linspace(double a, double b, int n) {
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

void parse_atom(Block b, Config& cfg) {
    AtomParams& a = cfg.atom;
    a.omega01 = ghz(b.required("omega01_ghz"));
    a.omega12 = ghz(b.required("omega12_ghz"));
    a.gamma_coh_10 = mhz(b.required("gamma_coh_10_mhz"));
    a.gamma_coh_21 = mhz(b.required("gamma_coh_21_mhz"));
    if (auto g = b.number("gamma_coh_20_mhz")) a.gamma_coh_20 = mhz(*g);
    if (auto c = b.number("cc_ff")) a.cc = *c * 1e-15;
    if (auto c = b.number("c_sigma_ff")) a.c_sigma = *c * 1e-15;
    a.z0 = b.positive("z0_ohm", 50.0);

    if (auto g = b.number("gamma_rel_10_mhz")) {
        a.gamma_rel_10 = mhz(*g);
    } else if (a.cc && a.c_sigma) {
        if (!(*a.cc > 0.0) || !(*a.c_sigma > 0.0))
            fail(b.key_path("cc_ff"), "circuit capacitances must be positive");
        a.gamma_rel_10 = gamma10_from_circuit(a.omega01, *a.cc, a.z0, *a.c_sigma);
    } else {
        fail(b.key_path("gamma_rel_10_mhz"), "required unless cc_ff and c_sigma_ff are given");
    }
    if (auto g = b.number("gamma_rel_21_mhz")) {
        a.gamma_rel_21 = mhz(*g);
    } else {
        a.gamma_rel_21 = 2.0 * a.gamma_rel_10;
        cfg.gamma21_from_dipole_ratio = true;
    }

    if (auto m = b.string("dephasing_model")) {
        if (*m == "direct_gamma") a.model = DephasingModel::direct_gamma;
        else if (*m == "dephasing_operator") a.model = DephasingModel::dephasing_operator;
        else fail(b.key_path("dephasing_model"), "expected 'direct_gamma' or 'dephasing_operator'");
    }
    b.finish();

    try {
        validate(a);
    } catch (const InputError& e) {
        fail("atom", e.what());
    }
}

void parse_drive(Block b, DriveConfig& d) {
    if (auto f = b.number("probe_freq_ghz")) d.probe_freq_hz = *f * 1e9;
    d.probe_photons = b.non_negative("probe_photons", d.probe_photons);
    d.probe_power_dbm = b.number("probe_power_dbm");
    if (auto f = b.number("control_freq_ghz")) d.control_freq_hz = *f * 1e9;
    d.control_photons = b.non_negative("control_photons", d.control_photons);
    d.control_power_dbm = b.number("control_power_dbm");
    b.finish();
}

void parse_sweep(Block b, SweepConfig& s) {
    if (auto c = b.number("center_ghz")) s.center_hz = *c * 1e9;
    s.span_hz = b.non_negative("span_mhz", s.span_hz * 1e-6) * 1e6;
    s.points = static_cast<int>(b.integer("points", s.points, 1));
    s.freqs_hz = b.numbers("freqs_ghz", 1e9);
    s.power_start_dbm = b.number("power_start_dbm", s.power_start_dbm);
    s.power_stop_dbm = b.number("power_stop_dbm", s.power_stop_dbm);
    s.power_points = static_cast<int>(b.integer("power_points", s.power_points, 1));
    s.powers_dbm = b.numbers("powers_dbm");
    s.control_on = b.boolean("control_on", s.control_on);
    b.finish();
    if (s.powers_dbm.empty())
        s.powers_dbm = linspace(s.power_start_dbm, s.power_stop_dbm, s.power_points);
}

void parse_kerr(Block b, KerrConfig& k) {
    k.detuning_hz = b.number("detuning_mhz", k.detuning_hz * 1e-6) * 1e6;
    k.photons = b.numbers("photons");
    const double lo = b.non_negative("photon_start", 0.02);
    const double hi = b.non_negative("photon_stop", 0.5);
    const int n = static_cast<int>(b.integer("photon_points", 25, 1));
    b.finish();
    if (k.photons.empty()) k.photons = linspace(lo, hi, n);
    for (double n_c : k.photons)
        if (n_c < 0.0) fail(b.key_path("photons"), "photon numbers must be non-negative");
}

void parse_saturation(Block b, SaturationConfig& s) {
    s.detuning_hz = b.number("detuning_mhz", s.detuning_hz * 1e-6) * 1e6;
    s.control_photons = b.non_negative("control_photons", s.control_photons);
    s.power_start_dbm = b.number("power_start_dbm", s.power_start_dbm);
    s.power_stop_dbm = b.number("power_stop_dbm", s.power_stop_dbm);
    s.power_points = static_cast<int>(b.integer("power_points", s.power_points, 2));
    s.tail_decades = b.positive("tail_decades", s.tail_decades);
    b.finish();
}

void parse_pulse(Block b, PulseConfig& p) {
    p.detuning_hz = b.number("detuning_mhz", p.detuning_hz * 1e-6) * 1e6;
    p.control_photons = b.non_negative("control_photons", p.control_photons);
    p.start_s = b.number("start_ns", p.start_s * 1e9) * 1e-9;
    p.duration_s = b.non_negative("duration_ns", p.duration_s * 1e9) * 1e-9;
    p.rise_s = b.non_negative("rise_ns", p.rise_s * 1e9) * 1e-9;
    p.stop_s = b.number("stop_ns", p.stop_s * 1e9) * 1e-9;
    p.samples = static_cast<int>(b.integer("samples", p.samples, 2));
    b.finish();
    if (!(p.stop_s > 0.0)) fail(b.key_path("stop_ns"), "must be positive");
    if (p.rise_s > p.duration_s) fail(b.key_path("rise_ns"), "must not exceed duration_ns");
}

FitParam fit_param_from_key(const std::string& key, const std::string& path) {
    for (FitParam p : kAllFitParams)
        if (fit_param_key(p) == key) return p;
    fail(path, "unknown fit parameter");
}

void parse_fit(Block b, FitConfig& f) {
    if (const json* free = b.find("free")) {
        if (!free->is_array() || free->empty())
            fail(b.key_path("free"), "expected a non-empty array of parameter names");
        f.free.clear();
        for (std::size_t i = 0; i < free->size(); ++i) {
            const std::string where = b.key_path("free") + "[" + std::to_string(i) + "]";
            if (!(*free)[i].is_string()) fail(where, "expected a parameter name");
            const FitParam p = fit_param_from_key((*free)[i].get<std::string>(), where);
            for (FitParam q : f.free)
                if (q == p) fail(where, "listed twice");
            f.free.push_back(p);
        }
    }
    if (auto init = b.child("initial")) {
        for (const auto& [key, value] : init->raw().items()) {
            const FitParam p = fit_param_from_key(key, init->key_path(key));
            f.initial[p] = fit_param_from_external(p, init->required(key));
        }
    }
    if (auto bounds = b.child("bounds")) {
        for (const auto& [key, value] : bounds->raw().items()) {
            const std::string where = bounds->key_path(key);
            const FitParam p = fit_param_from_key(key, where);
            if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
                !value[1].is_number())
                fail(where, "expected [lower, upper]");
            double lo = fit_param_from_external(p, value[0].get<double>());
            double hi = fit_param_from_external(p, value[1].get<double>());
            if (!(lo < hi)) fail(where, "lower bound must be below upper bound");
            f.bounds[p] = {lo, hi};
        }
    }
    f.max_iterations = static_cast<int>(b.integer("max_iterations", f.max_iterations, 1));
    f.ftol = b.positive("ftol", f.ftol);
    f.xtol = b.positive("xtol", f.xtol);
    f.gtol = b.positive("gtol", f.gtol);
    f.restarts = static_cast<int>(b.integer("restarts", f.restarts, 1));
    f.restart_spread = b.non_negative("restart_spread", f.restart_spread);
    f.seed = static_cast<std::uint64_t>(b.integer("seed", static_cast<long long>(f.seed), 0));
    if (auto s = b.string("residual_space")) {
        if (*s == "complex") f.space = ResidualSpace::complex;
        else if (*s == "amplitude_phase") f.space = ResidualSpace::amplitude_phase;
        else fail(b.key_path("residual_space"), "expected 'complex' or 'amplitude_phase'");
    }
    b.finish();
}

void parse_synth(Block b, SynthConfig& s) {
    s.sigma = b.non_negative("sigma", s.sigma);
    s.seed = static_cast<std::uint64_t>(b.integer("seed", static_cast<long long>(s.seed), 0));
    s.averages = static_cast<int>(b.integer("averages", s.averages, 1));
    s.include_control_off = b.boolean("include_control_off", s.include_control_off);
    b.finish();
}

void parse_solver(Block b, SolverConfig& s) {
    s.rtol = b.positive("rtol", s.rtol);
    s.atol = b.positive("atol", s.atol);
    s.steady_residual = b.positive("steady_residual", s.steady_residual);
    b.finish();
}

}  // namespace

std::string fit_param_key(FitParam p) {
    switch (p) {
        case FitParam::omega01:
        case FitParam::omega12: return std::string(fit_param_name(p)) + "_ghz";
        case FitParam::amplitude: return "amplitude";
        case FitParam::phase_offset: return "phase_offset_deg";
        default: return std::string(fit_param_name(p)) + "_mhz";
    }
}

double fit_param_to_external(FitParam p, double internal) {
    switch (p) {
        case FitParam::omega01:
        case FitParam::omega12: return constants::ordinary(internal) * 1e-9;
        case FitParam::amplitude: return internal;
        case FitParam::phase_offset: return internal * 180.0 / std::numbers::pi;
        default: return constants::ordinary(internal) * 1e-6;
    }
}

double fit_param_from_external(FitParam p, double external) {
    switch (p) {
        case FitParam::omega01:
        case FitParam::omega12: return ghz(external);
        case FitParam::amplitude: return external;
        case FitParam::phase_offset: return external * std::numbers::pi / 180.0;
        default: return mhz(external);
    }
}

Config parse_config(const json& doc) {
    Block root(doc, "");
    const json* version = root.find("schema_version");
    if (!version) fail("schema_version", "required key is missing");
    if (!version->is_number_integer() || version->get<long long>() != kSchemaVersion)
        fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");

    Config cfg;
    auto atom = root.child("atom");
    if (!atom) fail("atom", "required block is missing");
    parse_atom(std::move(*atom), cfg);
    parse_drive(block_or_empty(root, "drive"), cfg.drive);
    parse_sweep(block_or_empty(root, "sweep"), cfg.sweep);
    parse_kerr(block_or_empty(root, "kerr"), cfg.kerr);
    parse_saturation(block_or_empty(root, "saturation"), cfg.saturation);
    parse_pulse(block_or_empty(root, "pulse"), cfg.pulse);
    parse_fit(block_or_empty(root, "fit"), cfg.fit);
    parse_synth(block_or_empty(root, "synth"), cfg.synth);
    parse_solver(block_or_empty(root, "solver"), cfg.solver);
    cfg.parallelism = static_cast<unsigned>(root.integer("parallelism", 1, 1));
    root.finish();
    return cfg;
}

json parse_json_text(const std::string& text) {
    std::string last_key;
    const json::parser_callback_t track = [&last_key](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::key) last_key = parsed.get<std::string>();
        return true;
    };
    try {
        return json::parse(text, track);
    } catch (const json::parse_error& e) {
        std::string msg = "malformed JSON";
        if (!last_key.empty()) msg += " after key '" + last_key + "'";
        msg += ": ";
        msg += e.what();
        throw ConfigError(msg);
    }
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(parse_json_text(ss.str()));
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' must have the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ConfigError(path + ": '" + parts[i] + "' is not an object");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

double probe_power_dbm(const Config& cfg, double omega_p) {
    if (cfg.drive.probe_power_dbm) return *cfg.drive.probe_power_dbm;
    return watts_to_dbm(
        power_from_photon_number(cfg.drive.probe_photons, omega_p, cfg.atom.gamma_rel_10));
}

double control_power_dbm(const Config& cfg, double omega_c) {
    if (cfg.drive.control_power_dbm) return *cfg.drive.control_power_dbm;
    return watts_to_dbm(
        power_from_photon_number(cfg.drive.control_photons, omega_c, cfg.atom.gamma_rel_21));
}

}  // namespace xkerr::config
