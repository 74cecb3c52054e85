#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "xkerr/atom.hpp"

namespace xkerr {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Step budget between consecutive grid times.
    std::size_t max_steps = 50'000'000;
};

/// Generator evaluated at time t (seconds).
using TimeDependentLiouvillian = std::function<Liouvillian(double)>;

/// Integrates dvec(rho)/dt = L vec(rho) with the adaptive Dormand-Prince 5(4)
/// pair of Boost.Odeint, stepping onto every grid time. rho0 is the state at
/// t_grid[0]; the result holds one state per grid time. Throws InputError for
/// a bad grid and StepFailure when the step budget runs out, the state turns
/// non-finite or the trace drifts by more than 1e-8.
std::vector<DensityMatrix> time_evolve(const Liouvillian& generator, const DensityMatrix& rho0,
                                       std::span<const double> t_grid,
                                       const OdeOptions& options = {});

std::vector<DensityMatrix> time_evolve(const TimeDependentLiouvillian& generator,
                                       const DensityMatrix& rho0,
                                       std::span<const double> t_grid,
                                       const OdeOptions& options = {});

}  // namespace xkerr
