#pragma once

// Line power, photon flux, photons per interaction time and Rabi frequency.
//
// One photon per interaction time means a flux of Γ/2π photons per second
// for the transition that scatters the tone (Γ10 for the probe, Γ21 for the
// control).

namespace xkerr {

enum class Tone { probe, control };

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// P / (ħω), photons per second.
double photon_flux(double watts, double omega);

/// ⟨N_c⟩ = P_c / (ħ ω_c Γ21 / 2π).
double control_photon_number(double p_c, double omega_c, double gamma_rel_21);
/// ⟨N_p⟩ = P_p / (ħ ω_p Γ10 / 2π).
double probe_photon_number(double p_p, double omega_p, double gamma_rel_10);
/// Inverse of the photon-number maps: ⟨N⟩ ħ ω Γ / 2π.
double power_from_photon_number(double mean_photons, double omega, double gamma);

/// Ω_p = sqrt(2 Γ10 P / (ħω)); the control sees a √2 larger dipole, so
/// Ω_c(P) = √2 Ω_p(P).
double rabi_from_power(double watts, double omega, double gamma_rel_10, Tone tone);

/// Probe Rabi frequency for ⟨N_p⟩ photons at ω_p.
double probe_rabi_from_photons(double mean_photons, double omega_p, double gamma_rel_10);
/// Control Rabi frequency for ⟨N_c⟩ photons at ω_c (normalized with Γ21).
double control_rabi_from_photons(double mean_photons, double omega_c, double gamma_rel_10,
                                 double gamma_rel_21);

struct PowerPoint {
    double power_dbm = 0.0;
    double power_watts = 0.0;
    double photon_flux = 0.0;
    double mean_photons = 0.0;
};

/// Every representation of a tone at `dbm`, normalized by the rate `gamma`
/// of the transition it drives.
PowerPoint make_power_point(double dbm, double omega, double gamma);

}  // namespace xkerr
