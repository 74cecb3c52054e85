#include "xkerr/evolve.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "xkerr/errors.hpp"

namespace xkerr {

namespace {

namespace odeint = boost::numeric::odeint;

// Re/Im interleaved, the memory layout of std::complex.
using State = std::array<double, 18>;

Eigen::Map<Vector9c> as_complex(State& x) {
    return Eigen::Map<Vector9c>(reinterpret_cast<Complex*>(x.data()));
}
Eigen::Map<const Vector9c> as_complex(const State& x) {
    return Eigen::Map<const Vector9c>(reinterpret_cast<const Complex*>(x.data()));
}

void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw InputError("time grid is empty");
    if (!(t_grid[0] >= 0.0)) throw InputError("time grid must start at t >= 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1])) throw InputError("time grid must be strictly increasing");
}

template <typename Generator>
std::vector<DensityMatrix> integrate(Generator&& generator, double norm_estimate,
                                     const DensityMatrix& rho0, std::span<const double> t_grid,
                                     const OdeOptions& opt) {
    check_grid(t_grid);
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    const Complex trace0 = rho0.trace();

    State x;
    as_complex(x) = rho0.vectorized();
    const auto rhs = [&](const State& y, State& dydt, double t) {
        as_complex(dydt) = generator(t) * as_complex(y);
    };
    const auto observe = [&](const State& y, double t) {
        DensityMatrix rho = DensityMatrix::from_vector(as_complex(y));
        if (!rho.matrix().allFinite()) throw StepFailure("non-finite state during integration");
        if (std::abs(rho.trace() - trace0) > 1e-8) {
            std::ostringstream msg;
            msg << "trace drifted by " << std::abs(rho.trace() - trace0) << " at t = " << t << " s";
            throw StepFailure(msg.str());
        }
        out.push_back(std::move(rho));
    };
    if (t_grid.size() == 1) {
        out.push_back(rho0);
        return out;
    }

    const double span = t_grid.back() - t_grid.front();
    const double dt = norm_estimate > 0.0 ? std::min(0.01 / norm_estimate, span) : span;
    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), dt, observe,
                                odeint::max_step_checker(static_cast<int>(
                                    std::min<std::size_t>(opt.max_steps, INT_MAX))));
    } catch (const odeint::odeint_error& e) {
        throw StepFailure(std::string("integration failed: ") + e.what());
    }
    return out;
}

}  // namespace

std::vector<DensityMatrix> time_evolve(const Liouvillian& generator, const DensityMatrix& rho0,
                                       std::span<const double> t_grid, const OdeOptions& options) {
    const double norm = generator.cwiseAbs().rowwise().sum().maxCoeff();
    return integrate([&](double) -> const Liouvillian& { return generator; }, norm, rho0, t_grid,
                     options);
}

std::vector<DensityMatrix> time_evolve(const TimeDependentLiouvillian& generator,
                                       const DensityMatrix& rho0, std::span<const double> t_grid,
                                       const OdeOptions& options) {
    if (t_grid.empty()) throw InputError("time grid is empty");
    const double norm = generator(t_grid[0]).cwiseAbs().rowwise().sum().maxCoeff();
    return integrate(generator, norm, rho0, t_grid, options);
}

}  // namespace xkerr
