#pragma once

// Driven three-level ladder (|0>, |1>, |2>) in the doubly rotating frame:
// Hamiltonian, Lindblad generator, steady state and probe transmission.
//
// All rates and frequencies are angular (rad/s). Vectorization is
// column-stacking: vec(rho)[i + 3 j] = rho(i, j).

#include <complex>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace xkerr {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;
using Liouvillian = Eigen::Matrix<Complex, 9, 9>;

/// How coherence decay rates enter the generator.
enum class DephasingModel {
    /// gamma_coh_* are imposed directly on the coherence elements of L.
    direct_gamma,
    /// Pure dephasing jump operators on |1> and |2> reproduce gamma_coh_10
    /// and gamma_coh_21; gamma_coh_20 follows from them.
    dephasing_operator,
};

struct AtomParams {
    double omega01 = 0.0;
    double omega12 = 0.0;
    double gamma_rel_10 = 0.0;
    double gamma_rel_21 = 0.0;
    double gamma_coh_10 = 0.0;
    double gamma_coh_21 = 0.0;
    /// Decay rate of rho_20. Only read in direct-gamma mode; when empty the
    /// default from default_gamma20() applies.
    std::optional<double> gamma_coh_20;
    std::optional<double> cc;       // F
    std::optional<double> c_sigma;  // F
    double z0 = 50.0;               // ohm
    DephasingModel model = DephasingModel::direct_gamma;

    double anharmonicity() const { return omega01 - omega12; }
};

/// Pure dephasing rates of levels 1 and 2 implied by the relaxation and
/// coherence rates. Negative values mean the rates are not reachable by
/// uncorrelated level dephasing.
struct PureDephasing {
    double level1 = 0.0;
    double level2 = 0.0;
    bool consistent() const { return level1 >= 0.0 && level2 >= 0.0; }
};

PureDephasing pure_dephasing(const AtomParams& atom);

/// gamma_20 = gamma_21 - gamma_10 when the rates admit non-negative level
/// dephasing, otherwise (gamma_10 + gamma_21) / 2.
double default_gamma20(const AtomParams& atom);

/// The rho_20 decay rate the generator actually uses.
double effective_gamma20(const AtomParams& atom);

/// Throws InvalidRates on negative rates, non-positive or inverted level
/// frequencies, or (in dephasing-operator mode) negative pure dephasing.
void validate(const AtomParams& atom);

struct DriveParams {
    double omega_p = 0.0;
    double omega_c = 0.0;
    double rabi_p = 0.0;
    double rabi_c = 0.0;
};

inline double probe_detuning(const AtomParams& atom, const DriveParams& drive) {
    return drive.omega_p - atom.omega01;
}
inline double control_detuning(const AtomParams& atom, const DriveParams& drive) {
    return drive.omega_c - atom.omega12;
}

/// 3x3 complex Hermitian unit-trace state.
class DensityMatrix {
public:
    /// Ground state |0><0|.
    DensityMatrix();
    explicit DensityMatrix(const Matrix3c& rho) : rho_(rho) {}

    static DensityMatrix basis_state(int level);
    static DensityMatrix from_vector(const Vector9c& v);

    Vector9c vectorized() const;
    const Matrix3c& matrix() const { return rho_; }
    Complex operator()(int i, int j) const { return rho_(i, j); }

    Complex trace() const { return rho_.trace(); }
    /// max |rho - rho^dagger| over elements.
    double hermiticity_error() const;
    /// Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const;

    /// <1|rho|0>, the coherence radiating into the probe mode.
    Complex probe_coherence() const { return rho_(1, 0); }

private:
    Matrix3c rho_;
};

struct TransmissionPoint {
    Complex t{1.0, 0.0};
    Complex r{0.0, 0.0};

    double magnitude() const { return std::abs(t); }
    /// arg(t) in degrees, in (-180, 180].
    double phase_deg() const;
};

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double deg);

/// arg(on) - arg(off) in degrees, unwrapped across the branch cut.
double phase_difference_deg(Complex on, Complex off);

constexpr int vec_index(int row, int col) { return row + 3 * col; }

Matrix3c build_hamiltonian(const AtomParams& atom, const DriveParams& drive);

/// Generic Lindblad superoperator for dρ/dt = -i[H, ρ] + Σ D[c]ρ, built from
/// Kronecker products.
Liouvillian lindblad_superoperator(const Matrix3c& hamiltonian,
                                   std::span<const Matrix3c> jump_operators);

Liouvillian build_liouvillian(const AtomParams& atom, const DriveParams& drive);

/// Linear functional tr(rho) acting on vec(rho).
Eigen::Matrix<Complex, 1, 9> trace_functional();

struct SteadyStateOptions {
    /// Bound on ||L vec(rho)||_inf with L divided by its largest entry.
    double residual_tolerance = 1e-9;
};

/// Steady state from the trace-augmented linear system. Falls back to the
/// SVD null vector when the LU route fails; throws SingularSystem when the
/// steady state is not unique.
DensityMatrix steady_state(const Liouvillian& generator,
                           const SteadyStateOptions& options = {});

/// Probe transmission t = 1 + r with r = -i (Γ10 / Ω_p) <1|ρ|0>. Throws
/// ZeroProbe when rabi_p is zero.
TransmissionPoint transmission(const AtomParams& atom, const DriveParams& drive,
                               const DensityMatrix& rho);

/// Radiative decay into the line, ω01² Cc² Z0 / (4 CΣ).
double gamma10_from_circuit(double omega01, double cc, double z0, double c_sigma);

}  // namespace xkerr
