#include "xkerr/calibration.hpp"

#include <cmath>
#include <numbers>

#include "xkerr/constants.hpp"
#include "xkerr/errors.hpp"

namespace xkerr {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositive(std::string(name) + " must be positive");
}

void require_power(double watts) {
    if (!(watts >= 0.0) || !std::isfinite(watts))
        throw NonPositive("power must be finite and non-negative");
}

}  // namespace

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
    require_power(watts);
    return 10.0 * std::log10(watts / 1e-3);
}

double photon_flux(double watts, double omega) {
    require_power(watts);
    require_positive(omega, "omega");
    return watts / (constants::hbar * omega);
}

double control_photon_number(double p_c, double omega_c, double gamma_rel_21) {
    require_positive(gamma_rel_21, "gamma_rel_21");
    return photon_flux(p_c, omega_c) * constants::two_pi / gamma_rel_21;
}

double probe_photon_number(double p_p, double omega_p, double gamma_rel_10) {
    require_positive(gamma_rel_10, "gamma_rel_10");
    return photon_flux(p_p, omega_p) * constants::two_pi / gamma_rel_10;
}

double power_from_photon_number(double mean_photons, double omega, double gamma) {
    if (!(mean_photons >= 0.0)) throw NonPositive("photon number must be non-negative");
    require_positive(omega, "omega");
    require_positive(gamma, "gamma");
    return mean_photons * constants::hbar * omega * gamma / constants::two_pi;
}

double rabi_from_power(double watts, double omega, double gamma_rel_10, Tone tone) {
    require_positive(gamma_rel_10, "gamma_rel_10");
    const double probe = std::sqrt(2.0 * gamma_rel_10 * photon_flux(watts, omega));
    return tone == Tone::control ? std::numbers::sqrt2 * probe : probe;
}

double probe_rabi_from_photons(double mean_photons, double omega_p, double gamma_rel_10) {
    const double p = power_from_photon_number(mean_photons, omega_p, gamma_rel_10);
    return rabi_from_power(p, omega_p, gamma_rel_10, Tone::probe);
}

double control_rabi_from_photons(double mean_photons, double omega_c, double gamma_rel_10,
                                 double gamma_rel_21) {
    const double p = power_from_photon_number(mean_photons, omega_c, gamma_rel_21);
    return rabi_from_power(p, omega_c, gamma_rel_10, Tone::control);
}

PowerPoint make_power_point(double dbm, double omega, double gamma) {
    PowerPoint pt;
    pt.power_dbm = dbm;
    pt.power_watts = dbm_to_watts(dbm);
    pt.photon_flux = photon_flux(pt.power_watts, omega);
    require_positive(gamma, "gamma");
    pt.mean_photons = pt.photon_flux * constants::two_pi / gamma;
    return pt;
}

}  // namespace xkerr
