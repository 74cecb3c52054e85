#pragma once

// Least-squares estimation of atom parameters from complex transmission
// data, and a synthetic data generator.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "xkerr/atom.hpp"

namespace xkerr {

enum class FitParam {
    gamma_rel_10,
    gamma_coh_10,
    gamma_rel_21,
    gamma_coh_21,
    gamma_coh_20,
    omega01,
    omega12,
    amplitude,
    phase_offset,
};

inline constexpr std::array<FitParam, 9> kAllFitParams = {
    FitParam::gamma_rel_10, FitParam::gamma_coh_10, FitParam::gamma_rel_21,
    FitParam::gamma_coh_21, FitParam::gamma_coh_20, FitParam::omega01,
    FitParam::omega12,      FitParam::amplitude,    FitParam::phase_offset,
};

std::string_view fit_param_name(FitParam p);
std::optional<FitParam> parse_fit_param(std::string_view name);

/// Atom plus instrument nuisance parameters t_model = a e^{iφ0} t_atom.
struct ModelParams {
    AtomParams atom;
    double amplitude = 1.0;
    double phase_offset = 0.0;  // rad
    /// Γ21 follows 2 Γ10 while it is not a free parameter.
    bool tie_gamma21 = false;

    double get(FitParam p) const;
    void set(FitParam p, double value);
    /// Atom with ties and defaults applied, as handed to the solver.
    AtomParams resolved_atom() const;
};

/// Fixed properties of the measurement shared by every record.
struct MeasurementSetup {
    double probe_power_dbm = -160.0;
    /// Absolute control frequency in Hz; the 1-2 transition if empty.
    std::optional<double> control_freq_hz;
};

struct Record {
    double freq_hz = 0.0;
    /// Control line power; -infinity means the control is off.
    double control_dbm = 0.0;
    Complex t{1.0, 0.0};
    double weight = 1.0;
};

struct Dataset {
    std::vector<Record> records;
};

Complex model_predict(const ModelParams& params, const MeasurementSetup& setup,
                      const Record& record, const SteadyStateOptions& solver = {});

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

enum class ResidualSpace {
    /// Re and Im of t_meas - t_model.
    complex,
    /// |t_meas| - |t_model| and the wrapped phase difference in radians.
    amplitude_phase,
};

struct FitSpec {
    std::vector<FitParam> free;
    ModelParams initial;
    MeasurementSetup setup;
    /// Missing entries default to [0, inf) for rates, (-inf, inf) otherwise.
    std::map<FitParam, Bounds> bounds;
    int max_iterations = 200;
    double ftol = 1e-12;
    double xtol = 1e-10;
    double gtol = 1e-12;
    /// Number of starts; starts after the first are Latin-hypercube
    /// perturbations of the initial guess by up to ± restart_spread.
    int restarts = 1;
    double restart_spread = 0.3;
    std::uint64_t seed = 0;
    ResidualSpace space = ResidualSpace::complex;
    unsigned threads = 1;
    SteadyStateOptions solver;
};

enum class FitStatus { converged, max_iterations };

std::string_view fit_status_name(FitStatus s);

struct FitReport {
    ModelParams params;
    std::map<FitParam, double> values;
    std::map<FitParam, double> stderrs;
    /// sqrt(Σ w_i |t_meas,i - t_model,i|²) at the returned parameters.
    double residual_norm = 0.0;
    FitStatus status = FitStatus::converged;
    int iterations = 0;
    /// Objective after each accepted step, starting from the initial value.
    std::vector<double> objective_history;
};

/// The least-squares problem in scaled coordinates x_k = p_k / s_k, where s_k
/// is the magnitude of the initial guess (1 for the phase offset).
class FitProblem {
public:
    FitProblem(const Dataset& data, const FitSpec& spec);

    std::size_t num_free() const { return spec_.free.size(); }
    std::size_t num_residuals() const { return 2 * data_.records.size(); }

    Eigen::VectorXd pack(const ModelParams& params) const;
    ModelParams unpack(const Eigen::VectorXd& x) const;
    const Eigen::VectorXd& scales() const { return scales_; }
    Eigen::VectorXd lower() const;
    Eigen::VectorXd upper() const;

    Eigen::VectorXd residuals(const Eigen::VectorXd& x) const;
    /// Forward-difference Jacobian reusing r = residuals(x).
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r) const;
    double objective(const Eigen::VectorXd& x) const;
    /// 2 J^T r from the difference Jacobian.
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

private:
    const Dataset& data_;
    FitSpec spec_;
    Eigen::VectorXd scales_;
};

/// Damped least squares (Levenberg-Marquardt) with bound reflection.
/// Throws DegenerateJacobian when the free parameters cannot be identified.
FitReport fit(const Dataset& data, const FitSpec& spec);

struct SynthesisGrid {
    std::vector<double> freqs_hz;
    /// Control powers; -infinity marks a control-off row.
    std::vector<double> control_dbm;
};

/// Model values plus (sigma / sqrt(averages)) times a standard complex
/// normal deviate per record. Records are ordered power outer, frequency inner.
Dataset synthesize(const ModelParams& params, const MeasurementSetup& setup,
                   const SynthesisGrid& grid, double sigma, std::uint64_t seed, int averages = 1);

}  // namespace xkerr
