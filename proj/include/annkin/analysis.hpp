#pragma once

// Post-processing on completed trajectories: empirical convergence order from
// three nested grids, power-law tail fitting in log space, and the step-size
// refinement table.

#include "annkin/model.hpp"
#include "annkin/solver.hpp"

#include <array>
#include <span>
#include <vector>

namespace annkin {

/// Empirical order at one sample time,
///   p(t) = log2 |(a_dt(t) - a_dt/2(t)) / (a_dt/2(t) - a_dt/4(t))|.
/// Where either difference vanishes the sample is flagged undefined rather
/// than dropped, so downstream tables keep an explicit gap.
struct OrderEstimate {
    double t = 0.0;
    double p = 0.0;                  ///< meaningful only when defined
    bool defined = false;
    std::array<double, 3> dts{};     ///< coarse, medium, fine step sizes

    bool operator==(const OrderEstimate&) const = default;
};

/// The three trajectories must share parameters and scheme and have step
/// sizes in the exact ratio 1 : 1/2 : 1/4; t must be a node of the coarse
/// grid (and is then a node of all three). Violations throw
/// std::invalid_argument.
OrderEstimate order_estimate(const Trajectory& coarse, const Trajectory& medium,
                             const Trajectory& fine, double t);

/// order_estimate at each time in ts, same preconditions per sample.
std::vector<OrderEstimate> order_series(const Trajectory& coarse, const Trajectory& medium,
                                        const Trajectory& fine, std::span<const double> ts);

/// Fit window [lo, hi] on the trajectory's time axis.
struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// Parameters of a(t) ~ amplitude / (t - shift)^exponent minimizing the sum
/// of squared log-density residuals over the window's grid points.
struct FitResult {
    double amplitude = 0.0;
    double shift = 0.0;
    double exponent = 0.0;
    FitWindow window{};
    double max_abs_log10_error = 0.0;  ///< max |log10 a - log10 fit| on the window
    double max_rel_error = 0.0;        ///< max |a - fit| / a on the window
};

/// Profiled least squares: for each candidate shift the (log amplitude,
/// exponent) pair is the closed-form linear fit of log a against
/// log(t - shift); the remaining 1-D problem in the shift is minimized by a
/// coarse multistart scan refined with golden-section search.
/// Requires at least 10 grid points inside the window and positive densities
/// there. Throws NumericError when the optimum is singular (exponent <= 0 or
/// shift running into the window edge).
FitResult power_law_fit(const Trajectory& traj, FitWindow window);

/// Densities a_dt(t) for each step size (rows) at each sample time (columns).
struct RefinementTable {
    std::vector<double> dts;
    std::vector<double> sample_times;
    std::vector<std::vector<double>> values;  ///< values[row][col]
};

/// Table rows for already-computed runs; every sample time must be a node of
/// every trajectory's grid.
RefinementTable refinement_values(std::span<const Trajectory> trajectories,
                                  std::span<const double> sample_times);

/// Convenience wrapper: solves one trajectory per step size (t_end = largest
/// sample time; threads as in solve_ladder) and tabulates it. Empty dts give
/// an empty table.
RefinementTable refinement_table(const ModelParams& params, std::span<const double> dts,
                                 std::span<const double> sample_times, SchemeKind scheme,
                                 int threads = 1);

} // namespace annkin
