#pragma once

// Trajectory driver. Starting from a_0, each step solves the implicit
// quadratic assembled by the stepper from the full history computed so far.
// The first step always uses the first-order form (two back values do not
// exist yet); from k = 2 on, the requested scheme applies.

#include "annkin/model.hpp"
#include "annkin/stepper.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace annkin {

/// How Trajectory::value_at treats off-grid times.
enum class Sampling {
    GridOnly,  ///< t must coincide with a grid node (tiny ulp-scale slack)
    Linear,    ///< off-grid t is linearly interpolated between nodes
};

/// A completed run on the uniform grid t_k = k*dt. Times are always derived
/// from the index so they cannot drift; only the densities are stored.
struct Trajectory {
    ModelParams params;
    SchemeKind scheme = SchemeKind::SecondOrder;
    double dt = 0.0;
    std::vector<double> values;  ///< a_0..a_K

    std::int64_t steps() const { return static_cast<std::int64_t>(values.size()) - 1; }
    double t_end() const { return static_cast<double>(steps()) * dt; }

    /// Density at time t. GridOnly throws std::invalid_argument when t is not
    /// a grid node; Linear interpolates. t outside [0, t_end] always throws.
    double value_at(double t, Sampling mode = Sampling::GridOnly) const;
};

/// Invoked with (completed steps, total steps) every few thousand steps and
/// once at completion. Must not throw.
using ProgressFn = std::function<void(std::int64_t, std::int64_t)>;

/// Number of steps K with t_end = K*dt. Throws std::invalid_argument unless
/// t_end/dt is an integer to within a few ulps (grids are never adjusted
/// silently) and 1 <= K <= 1e9.
std::int64_t grid_step_count(double dt, double t_end);

/// Full run with coefficients derived from the physical parameters.
Trajectory solve_trajectory(const ModelParams& params, double dt, double t_end,
                            SchemeKind scheme, const ProgressFn& progress = {});

/// Full run with explicitly supplied coefficients. This is the hook for
/// coefficient studies (e.g. beta = 0 reduces the model to the pure reaction
/// ODE while keeping alpha); params is carried along as metadata only.
Trajectory solve_trajectory_coeffs(const ModelParams& params, const DerivedCoeffs& coeffs,
                                   double t_end, SchemeKind scheme,
                                   const ProgressFn& progress = {});

/// Independent runs for each step size, in dts order. threads > 1 distributes
/// the runs round-robin over that many worker threads; results and their
/// order are identical to the serial ones either way.
std::vector<Trajectory> solve_ladder(const ModelParams& params, std::span<const double> dts,
                                     double t_end, SchemeKind scheme, int threads = 1);

} // namespace annkin
