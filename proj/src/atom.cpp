#include "xkerr/atom.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "xkerr/errors.hpp"

namespace xkerr {

namespace {

constexpr Complex kI{0.0, 1.0};

Liouvillian commutator_superoperator(const Matrix3c& h) {
    const Matrix3c id = Matrix3c::Identity();
    Liouvillian out;
    // vec(A X B) = (B^T ⊗ A) vec(X)
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                    out(a + 3 * b, c + 3 * d) =
                        -kI * (id(b, d) * h(a, c) - h(d, b) * id(a, c));
    return out;
}

Liouvillian kron(const Matrix3c& lhs, const Matrix3c& rhs) {
    Liouvillian out;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            out.block<3, 3>(3 * a, 3 * b) = lhs(a, b) * rhs;
    return out;
}

Matrix3c projector(int i, int j) {
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = 1.0;
    return m;
}

Liouvillian direct_gamma_liouvillian(const AtomParams& atom, const Matrix3c& h) {
    Liouvillian l = commutator_superoperator(h);
    const double g10 = atom.gamma_rel_10;
    const double g21 = atom.gamma_rel_21;
    l(vec_index(0, 0), vec_index(1, 1)) += g10;
    l(vec_index(1, 1), vec_index(1, 1)) -= g10;
    l(vec_index(1, 1), vec_index(2, 2)) += g21;
    l(vec_index(2, 2), vec_index(2, 2)) -= g21;

    const double g20 = effective_gamma20(atom);
    const std::array<std::array<double, 3>, 3> rate = {{
        {0.0, atom.gamma_coh_10, g20},
        {atom.gamma_coh_10, 0.0, atom.gamma_coh_21},
        {g20, atom.gamma_coh_21, 0.0},
    }};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) l(vec_index(i, j), vec_index(i, j)) -= rate[i][j];
    return l;
}

Liouvillian dephasing_operator_liouvillian(const AtomParams& atom, const Matrix3c& h) {
    const PureDephasing phi = pure_dephasing(atom);
    const std::array<Matrix3c, 4> jumps = {
        std::sqrt(atom.gamma_rel_10) * projector(0, 1),
        std::sqrt(atom.gamma_rel_21) * projector(1, 2),
        std::sqrt(2.0 * phi.level1) * projector(1, 1),
        std::sqrt(2.0 * phi.level2) * projector(2, 2),
    };
    return lindblad_superoperator(h, jumps);
}

}  // namespace

PureDephasing pure_dephasing(const AtomParams& atom) {
    PureDephasing phi;
    phi.level1 = atom.gamma_coh_10 - atom.gamma_rel_10 / 2.0;
    phi.level2 = atom.gamma_coh_21 - (atom.gamma_rel_10 + atom.gamma_rel_21) / 2.0 - phi.level1;
    return phi;
}

double default_gamma20(const AtomParams& atom) {
    const PureDephasing phi = pure_dephasing(atom);
    if (phi.consistent()) return atom.gamma_rel_21 / 2.0 + phi.level2;
    return (atom.gamma_coh_10 + atom.gamma_coh_21) / 2.0;
}

double effective_gamma20(const AtomParams& atom) {
    if (atom.model == DephasingModel::dephasing_operator)
        return atom.gamma_rel_21 / 2.0 + pure_dephasing(atom).level2;
    return atom.gamma_coh_20.value_or(default_gamma20(atom));
}

void validate(const AtomParams& atom) {
    auto check_rate = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidRates(std::string(name) + " must be a finite non-negative rate");
    };
    check_rate(atom.gamma_rel_10, "gamma_rel_10");
    check_rate(atom.gamma_rel_21, "gamma_rel_21");
    check_rate(atom.gamma_coh_10, "gamma_coh_10");
    check_rate(atom.gamma_coh_21, "gamma_coh_21");
    if (atom.gamma_coh_20) check_rate(*atom.gamma_coh_20, "gamma_coh_20");
    if (!(atom.omega12 > 0.0) || !(atom.omega01 > atom.omega12) || !std::isfinite(atom.omega01))
        throw InvalidRates("level frequencies must satisfy omega01 > omega12 > 0");
    if (atom.model == DephasingModel::dephasing_operator) {
        const PureDephasing phi = pure_dephasing(atom);
        if (!phi.consistent()) {
            std::ostringstream msg;
            msg << "coherence rates need negative pure dephasing (level 1: " << phi.level1
                << " rad/s, level 2: " << phi.level2
                << " rad/s); use direct-gamma mode or raise gamma_coh_*";
            throw InvalidRates(msg.str());
        }
    }
}

DensityMatrix::DensityMatrix() : rho_(Matrix3c::Zero()) { rho_(0, 0) = 1.0; }

DensityMatrix DensityMatrix::basis_state(int level) {
    Matrix3c m = Matrix3c::Zero();
    m(level, level) = 1.0;
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::from_vector(const Vector9c& v) {
    return DensityMatrix(Eigen::Map<const Matrix3c>(v.data()));
}

Vector9c DensityMatrix::vectorized() const { return Eigen::Map<const Vector9c>(rho_.data()); }

double DensityMatrix::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const Matrix3c herm = (rho_ + rho_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix3c> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

double TransmissionPoint::phase_deg() const {
    return wrap_degrees(std::arg(t) * 180.0 / std::numbers::pi);
}

double phase_difference_deg(Complex on, Complex off) {
    return wrap_degrees((std::arg(on) - std::arg(off)) * 180.0 / std::numbers::pi);
}

Matrix3c build_hamiltonian(const AtomParams& atom, const DriveParams& drive) {
    const double dp = probe_detuning(atom, drive);
    const double dc = control_detuning(atom, drive);
    Matrix3c h = Matrix3c::Zero();
    h(1, 1) = -dp;
    h(2, 2) = -(dp + dc);
    h(0, 1) = h(1, 0) = drive.rabi_p / 2.0;
    h(1, 2) = h(2, 1) = drive.rabi_c / 2.0;
    return h;
}

Liouvillian lindblad_superoperator(const Matrix3c& hamiltonian,
                                   std::span<const Matrix3c> jump_operators) {
    const Matrix3c id = Matrix3c::Identity();
    Liouvillian l = commutator_superoperator(hamiltonian);
    for (const Matrix3c& c : jump_operators) {
        const Matrix3c cdc = c.adjoint() * c;
        // Summed on its own so gain and loss cancel exactly in the trace.
        Liouvillian d = kron(c.conjugate(), c);
        d -= 0.5 * kron(id, cdc);
        d -= 0.5 * kron(cdc.transpose(), id);
        l += d;
    }
    return l;
}

Liouvillian build_liouvillian(const AtomParams& atom, const DriveParams& drive) {
    validate(atom);
    const Matrix3c h = build_hamiltonian(atom, drive);
    if (atom.model == DephasingModel::dephasing_operator)
        return dephasing_operator_liouvillian(atom, h);
    return direct_gamma_liouvillian(atom, h);
}

Eigen::Matrix<Complex, 1, 9> trace_functional() {
    Eigen::Matrix<Complex, 1, 9> tr = Eigen::Matrix<Complex, 1, 9>::Zero();
    for (int k = 0; k < 3; ++k) tr(vec_index(k, k)) = 1.0;
    return tr;
}

namespace {

double scaled_residual(const Liouvillian& scaled, const Vector9c& v) {
    return (scaled * v).cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& generator, const SteadyStateOptions& options) {
    const double scale = generator.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw SingularSystem("steady state is not unique: generator is zero or non-finite");
    const Liouvillian scaled = generator / scale;

    Liouvillian augmented = scaled;
    augmented.row(0) = trace_functional();
    Vector9c rhs = Vector9c::Zero();
    rhs(0) = 1.0;

    Eigen::PartialPivLU<Liouvillian> lu(augmented);
    Vector9c v = lu.solve(rhs);
    // A near-zero pivot means a second stationary state; the SVD decides.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const bool lu_ok = pivots.minCoeff() > 1e-14 * pivots.maxCoeff() && v.allFinite() && scaled_residual(scaled, v) < options.residual_tolerance &&
                       std::abs((trace_functional() * v).value() - 1.0) < options.residual_tolerance;
    if (lu_ok) return DensityMatrix::from_vector(v);

    // Null vector of L. A second vanishing singular value means the fixed
    // point is not unique.
    Eigen::JacobiSVD<Liouvillian> svd(scaled, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(7) < 1e-14) {
        std::ostringstream msg;
        msg << "steady state is not unique (second smallest singular value " << sv(7) << ")";
        throw SingularSystem(msg.str());
    }
    Vector9c null = svd.matrixV().col(8);
    const Complex tr = (trace_functional() * null).value();
    if (std::abs(tr) < 1e-12) throw SingularSystem("null vector of the generator has zero trace");
    null /= tr;
    const double residual = scaled_residual(scaled, null);
    if (!(residual < options.residual_tolerance)) {
        std::ostringstream msg;
        msg << "steady-state residual " << residual << " exceeds tolerance "
            << options.residual_tolerance;
        throw SingularSystem(msg.str());
    }
    return DensityMatrix::from_vector(null);
}

TransmissionPoint transmission(const AtomParams& atom, const DriveParams& drive,
                               const DensityMatrix& rho) {
    if (drive.rabi_p == 0.0) throw ZeroProbe("transmission is undefined without a probe drive");
    TransmissionPoint p;
    p.r = -kI * (atom.gamma_rel_10 / drive.rabi_p) * rho.probe_coherence();
    p.t = 1.0 + p.r;
    return p;
}

double gamma10_from_circuit(double omega01, double cc, double z0, double c_sigma) {
    if (!(omega01 > 0.0)) throw NonPositive("omega01 must be positive");
    if (!(z0 > 0.0)) throw NonPositive("z0 must be positive");
    if (!(c_sigma > 0.0)) throw NonPositive("c_sigma must be positive");
    if (!(cc >= 0.0)) throw NonPositive("cc must be non-negative");
    return omega01 * omega01 * cc * cc * z0 / (4.0 * c_sigma);
}

}  // namespace xkerr
