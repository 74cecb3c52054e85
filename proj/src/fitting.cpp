#include "xkerr/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "xkerr/calibration.hpp"
#include "xkerr/constants.hpp"
#include "xkerr/errors.hpp"

namespace xkerr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool non_negative(FitParam p) {
    switch (p) {
        case FitParam::gamma_rel_10:
        case FitParam::gamma_coh_10:
        case FitParam::gamma_rel_21:
        case FitParam::gamma_coh_21:
        case FitParam::gamma_coh_20:
        case FitParam::omega01:
        case FitParam::omega12:
        case FitParam::amplitude:
            return true;
        case FitParam::phase_offset:
            return false;
    }
    return false;
}

double wrap_radians(double x) {
    return std::remainder(x, 2.0 * std::numbers::pi);
}

double reflect_into(double v, double lo, double hi) {
    if (v > hi) v = hi - (v - hi);
    if (v < lo) v = lo + (lo - v);
    return std::clamp(v, lo, hi);
}

}  // namespace

std::string_view fit_param_name(FitParam p) {
    switch (p) {
        case FitParam::gamma_rel_10: return "gamma_rel_10";
        case FitParam::gamma_coh_10: return "gamma_coh_10";
        case FitParam::gamma_rel_21: return "gamma_rel_21";
        case FitParam::gamma_coh_21: return "gamma_coh_21";
        case FitParam::gamma_coh_20: return "gamma_coh_20";
        case FitParam::omega01: return "omega01";
        case FitParam::omega12: return "omega12";
        case FitParam::amplitude: return "amplitude";
        case FitParam::phase_offset: return "phase_offset";
    }
    return "";
}

std::optional<FitParam> parse_fit_param(std::string_view name) {
    for (FitParam p : kAllFitParams)
        if (fit_param_name(p) == name) return p;
    return std::nullopt;
}

std::string_view fit_status_name(FitStatus s) {
    return s == FitStatus::converged ? "converged" : "max_iterations";
}

double ModelParams::get(FitParam p) const {
    const AtomParams a = resolved_atom();
    switch (p) {
        case FitParam::gamma_rel_10: return a.gamma_rel_10;
        case FitParam::gamma_coh_10: return a.gamma_coh_10;
        case FitParam::gamma_rel_21: return a.gamma_rel_21;
        case FitParam::gamma_coh_21: return a.gamma_coh_21;
        case FitParam::gamma_coh_20: return effective_gamma20(a);
        case FitParam::omega01: return a.omega01;
        case FitParam::omega12: return a.omega12;
        case FitParam::amplitude: return amplitude;
        case FitParam::phase_offset: return phase_offset;
    }
    return 0.0;
}

void ModelParams::set(FitParam p, double value) {
    switch (p) {
        case FitParam::gamma_rel_10: atom.gamma_rel_10 = value; break;
        case FitParam::gamma_coh_10: atom.gamma_coh_10 = value; break;
        case FitParam::gamma_rel_21:
            atom.gamma_rel_21 = value;
            tie_gamma21 = false;
            break;
        case FitParam::gamma_coh_21: atom.gamma_coh_21 = value; break;
        case FitParam::gamma_coh_20: atom.gamma_coh_20 = value; break;
        case FitParam::omega01: atom.omega01 = value; break;
        case FitParam::omega12: atom.omega12 = value; break;
        case FitParam::amplitude: amplitude = value; break;
        case FitParam::phase_offset: phase_offset = value; break;
    }
}

AtomParams ModelParams::resolved_atom() const {
    AtomParams a = atom;
    if (tie_gamma21) a.gamma_rel_21 = 2.0 * a.gamma_rel_10;
    return a;
}

Complex model_predict(const ModelParams& params, const MeasurementSetup& setup,
                      const Record& record, const SteadyStateOptions& solver) {
    const AtomParams atom = params.resolved_atom();
    DriveParams drive;
    drive.omega_p = constants::angular(record.freq_hz);
    drive.omega_c = setup.control_freq_hz ? constants::angular(*setup.control_freq_hz) : atom.omega12;
    drive.rabi_p = rabi_from_power(dbm_to_watts(setup.probe_power_dbm), drive.omega_p,
                                   atom.gamma_rel_10, Tone::probe);
    if (std::isfinite(record.control_dbm))
        drive.rabi_c = rabi_from_power(dbm_to_watts(record.control_dbm), drive.omega_c,
                                       atom.gamma_rel_10, Tone::control);
    const DensityMatrix rho = steady_state(build_liouvillian(atom, drive), solver);
    return params.amplitude * std::polar(1.0, params.phase_offset) *
           transmission(atom, drive, rho).t;
}

FitProblem::FitProblem(const Dataset& data, const FitSpec& spec) : data_(data), spec_(spec) {
    scales_.resize(static_cast<Eigen::Index>(spec_.free.size()));
    for (std::size_t k = 0; k < spec_.free.size(); ++k) {
        const double v = std::abs(spec_.initial.get(spec_.free[k]));
        scales_(static_cast<Eigen::Index>(k)) =
            (spec_.free[k] == FitParam::phase_offset || v == 0.0) ? 1.0 : v;
    }
}

Eigen::VectorXd FitProblem::pack(const ModelParams& params) const {
    Eigen::VectorXd x(scales_.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
        x(k) = params.get(spec_.free[static_cast<std::size_t>(k)]) / scales_(k);
    return x;
}

ModelParams FitProblem::unpack(const Eigen::VectorXd& x) const {
    ModelParams p = spec_.initial;
    for (Eigen::Index k = 0; k < x.size(); ++k)
        p.set(spec_.free[static_cast<std::size_t>(k)], x(k) * scales_(k));
    return p;
}

Eigen::VectorXd FitProblem::lower() const {
    Eigen::VectorXd lo(scales_.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) {
        const FitParam p = spec_.free[static_cast<std::size_t>(k)];
        const auto it = spec_.bounds.find(p);
        const double v = it != spec_.bounds.end() ? it->second.lower : (non_negative(p) ? 0.0 : -kInf);
        lo(k) = v / scales_(k);
    }
    return lo;
}

Eigen::VectorXd FitProblem::upper() const {
    Eigen::VectorXd hi(scales_.size());
    for (Eigen::Index k = 0; k < hi.size(); ++k) {
        const FitParam p = spec_.free[static_cast<std::size_t>(k)];
        const auto it = spec_.bounds.find(p);
        hi(k) = (it != spec_.bounds.end() ? it->second.upper : kInf) / scales_(k);
    }
    return hi;
}

Eigen::VectorXd FitProblem::residuals(const Eigen::VectorXd& x) const {
    const ModelParams params = unpack(x);
    Eigen::VectorXd r(static_cast<Eigen::Index>(num_residuals()));
    detail::parallel_for(data_.records.size(), spec_.threads, [&](std::size_t i) {
        const Record& rec = data_.records[i];
        const Complex model = model_predict(params, spec_.setup, rec, spec_.solver);
        const double sw = std::sqrt(rec.weight);
        const auto row = static_cast<Eigen::Index>(2 * i);
        if (spec_.space == ResidualSpace::complex) {
            const Complex d = rec.t - model;
            r(row) = sw * d.real();
            r(row + 1) = sw * d.imag();
        } else {
            r(row) = sw * (std::abs(rec.t) - std::abs(model));
            r(row + 1) = sw * wrap_radians(std::arg(rec.t) - std::arg(model));
        }
    });
    return r;
}

Eigen::MatrixXd FitProblem::jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r) const {
    const Eigen::VectorXd hi = upper();
    Eigen::MatrixXd j(r.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double h = std::max(1e-6 * std::abs(x(k)), 1e-12);
        if (x(k) + h > hi(k)) h = -h;
        Eigen::VectorXd xh = x;
        xh(k) += h;
        j.col(k) = (residuals(xh) - r) / h;
    }
    return j;
}

double FitProblem::objective(const Eigen::VectorXd& x) const { return residuals(x).squaredNorm(); }

Eigen::VectorXd FitProblem::gradient(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd r = residuals(x);
    return 2.0 * jacobian(x, r).transpose() * r;
}

namespace {

struct RunResult {
    Eigen::VectorXd x;
    double cost = kInf;
    int iterations = 0;
    FitStatus status = FitStatus::max_iterations;
    std::vector<double> history;
};

void check_identifiable(const Eigen::MatrixXd& j) {
    Eigen::MatrixXd normalized = j;
    const double largest = j.colwise().norm().maxCoeff();
    for (Eigen::Index k = 0; k < j.cols(); ++k) {
        const double n = j.col(k).norm();
        // Columns are in scaled coordinates, so rounding noise shows up as a
        // tiny norm next to the others.
        if (!(n > 1e-8 * largest) || !std::isfinite(n)) {
            std::ostringstream msg;
            msg << "residuals do not depend on free parameter " << k;
            throw DegenerateJacobian(msg.str());
        }
        normalized.col(k) /= n;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normalized);
    qr.setThreshold(1e-10);
    if (qr.rank() < j.cols()) {
        std::ostringstream msg;
        msg << "Jacobian has rank " << qr.rank() << " for " << j.cols() << " free parameters";
        throw DegenerateJacobian(msg.str());
    }
}

RunResult levenberg_marquardt(const FitProblem& problem, const FitSpec& spec, Eigen::VectorXd x) {
    const Eigen::VectorXd lo = problem.lower(), hi = problem.upper();
    auto evaluate = [&](const Eigen::VectorXd& at, Eigen::VectorXd& r) {
        try {
            r = problem.residuals(at);
        } catch (const InputError&) {
            return kInf;
        } catch (const NumericalError&) {
            return kInf;
        }
        const double c = r.squaredNorm();
        return std::isfinite(c) ? c : kInf;
    };

    RunResult run;
    Eigen::VectorXd r;
    double cost = evaluate(x, r);
    if (!std::isfinite(cost)) throw NumericalError("model cannot be evaluated at the initial guess");
    run.history.push_back(cost);
    double lambda = 1e-3;

    for (int iter = 1; iter <= spec.max_iterations; ++iter) {
        run.iterations = iter;
        const Eigen::MatrixXd j = problem.jacobian(x, r);
        if (iter == 1) check_identifiable(j);
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= spec.gtol) {
            run.status = FitStatus::converged;
            break;
        }
        const Eigen::MatrixXd a = j.transpose() * j;
        Eigen::VectorXd diag = a.diagonal().cwiseMax(1e-30);

        bool accepted = false;
        double reduction = 0.0;
        Eigen::VectorXd step;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = a;
            damped.diagonal() += lambda * diag;
            const Eigen::VectorXd delta = damped.ldlt().solve(-g);
            Eigen::VectorXd xn = x + delta;
            for (Eigen::Index k = 0; k < xn.size(); ++k) xn(k) = reflect_into(xn(k), lo(k), hi(k));
            Eigen::VectorXd rn;
            const double cn = evaluate(xn, rn);
            if (cn < cost) {
                step = xn - x;
                reduction = (cost - cn) / cost;
                x = xn;
                r = rn;
                cost = cn;
                run.history.push_back(cost);
                lambda = std::max(lambda * 0.1, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted || reduction <= spec.ftol ||
            step.norm() <= spec.xtol * (x.norm() + spec.xtol)) {
            run.status = FitStatus::converged;
            break;
        }
    }
    run.x = x;
    run.cost = cost;
    return run;
}

std::vector<Eigen::VectorXd> start_points(const FitProblem& problem, const FitSpec& spec) {
    const Eigen::VectorXd x0 = problem.pack(spec.initial);
    std::vector<Eigen::VectorXd> starts = {x0};
    const int extra = spec.restarts - 1;
    if (extra <= 0) return starts;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::VectorXd lo = problem.lower(), hi = problem.upper();
    std::vector<std::vector<int>> strata(static_cast<std::size_t>(x0.size()));
    for (auto& s : strata) {
        s.resize(static_cast<std::size_t>(extra));
        std::iota(s.begin(), s.end(), 0);
        std::shuffle(s.begin(), s.end(), rng);
    }
    for (int j = 0; j < extra; ++j) {
        Eigen::VectorXd x = x0;
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double u = (strata[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] +
                              unit(rng)) / extra;
            const double offset = spec.restart_spread * (2.0 * u - 1.0);
            x(k) = x0(k) == 0.0 ? offset : x0(k) * (1.0 + offset);
            x(k) = std::clamp(x(k), lo(k), hi(k));
        }
        starts.push_back(x);
    }
    return starts;
}

}  // namespace

FitReport fit(const Dataset& data, const FitSpec& spec) {
    if (spec.free.empty()) throw InputError("no free parameters");
    std::set<FitParam> seen(spec.free.begin(), spec.free.end());
    if (seen.size() != spec.free.size()) throw InputError("free parameters listed twice");
    for (const Record& rec : data.records)
        if (!std::isfinite(rec.freq_hz) || !std::isfinite(rec.t.real()) ||
            !std::isfinite(rec.t.imag()) || !(rec.weight >= 0.0) || std::isnan(rec.control_dbm))
            throw InputError("dataset contains non-finite values or negative weights");
    for (const auto& [param, b] : spec.bounds) {
        const double v = spec.initial.get(param);
        if (!(b.lower <= v && v <= b.upper))
            throw InputError("initial guess of " + std::string(fit_param_name(param)) +
                             " lies outside its bounds");
    }
    if (data.records.size() < 3 * spec.free.size()) {
        std::ostringstream msg;
        msg << data.records.size() << " records cannot identify " << spec.free.size()
            << " free parameters (need at least " << 3 * spec.free.size() << ")";
        throw DegenerateJacobian(msg.str());
    }
    if (spec.max_iterations < 1) throw InputError("max_iterations must be at least 1");

    const FitProblem problem(data, spec);
    RunResult best;
    for (const Eigen::VectorXd& start : start_points(problem, spec)) {
        RunResult run = levenberg_marquardt(problem, spec, start);
        if (run.cost < best.cost) best = std::move(run);
    }

    FitReport report;
    report.params = problem.unpack(best.x);
    report.status = best.status;
    report.iterations = best.iterations;
    report.objective_history = best.history;

    const Eigen::VectorXd r = problem.residuals(best.x);
    report.residual_norm = r.norm();
    const Eigen::MatrixXd j = problem.jacobian(best.x, r);
    const auto m = r.size(), n = best.x.size();
    const double s2 = m > n ? r.squaredNorm() / static_cast<double>(m - n)
                            : std::numeric_limits<double>::quiet_NaN();
    const Eigen::MatrixXd cov =
        (j.transpose() * j).completeOrthogonalDecomposition().pseudoInverse() * s2;
    for (Eigen::Index k = 0; k < n; ++k) {
        const FitParam p = spec.free[static_cast<std::size_t>(k)];
        report.values[p] = report.params.get(p);
        report.stderrs[p] = std::sqrt(std::max(cov(k, k), 0.0)) * problem.scales()(k);
    }
    return report;
}

Dataset synthesize(const ModelParams& params, const MeasurementSetup& setup,
                   const SynthesisGrid& grid, double sigma, std::uint64_t seed, int averages) {
    if (!(sigma >= 0.0)) throw InputError("noise sigma must be non-negative");
    if (averages < 1) throw InputError("averages must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double scale = sigma / std::sqrt(static_cast<double>(averages));

    Dataset data;
    data.records.reserve(grid.freqs_hz.size() * grid.control_dbm.size());
    for (double dbm : grid.control_dbm) {
        for (double f : grid.freqs_hz) {
            Record rec;
            rec.freq_hz = f;
            rec.control_dbm = dbm;
            rec.t = model_predict(params, setup, rec);
            const double re = normal(rng);
            const double im = normal(rng);
            rec.t += scale * Complex(re, im);
            data.records.push_back(rec);
        }
    }
    return data;
}

}  // namespace xkerr
