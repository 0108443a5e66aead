#include "annkin/solver.hpp"

#include "annkin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace annkin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Nearest grid index for t, or -1 when t misses every node.
std::int64_t grid_index(double t, double dt, std::int64_t k_max) {
    const std::int64_t k = std::llround(t / dt);
    if (k < 0 || k > k_max) return -1;
    const double tol = 32.0 * kEps * std::max(std::abs(t), dt);
    if (std::abs(t - static_cast<double>(k) * dt) > tol) return -1;
    return k;
}

} // namespace

std::int64_t grid_step_count(double dt, double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("grid: dt must be positive and finite");
    if (!std::isfinite(t_end) || t_end < dt)
        throw std::invalid_argument("grid: t_end must satisfy t_end >= dt");

    const double ratio = t_end / dt;
    if (ratio > 1e9)
        throw std::invalid_argument("grid: t_end/dt exceeds 1e9 steps");
    const auto K = static_cast<std::int64_t>(std::llround(ratio));
    const double tol = 4.0 * kEps * std::max(ratio, 1.0);
    if (K < 1 || std::abs(ratio - static_cast<double>(K)) > tol) {
        std::ostringstream os;
        os << "grid: t_end/dt = " << ratio << " is not an integer step count";
        throw std::invalid_argument(os.str());
    }
    return K;
}

double Trajectory::value_at(double t, Sampling mode) const {
    const std::int64_t K = steps();
    if (K < 0) throw std::invalid_argument("value_at: empty trajectory");
    const double tmax = t_end();
    const double slack = 4.0 * kEps * std::max(tmax, 1.0);
    if (!std::isfinite(t) || t < 0.0 || t > tmax + slack) {
        std::ostringstream os;
        os << "value_at: t = " << t << " outside [0, " << tmax << "]";
        throw std::invalid_argument(os.str());
    }

    if (mode == Sampling::GridOnly) {
        const std::int64_t k = grid_index(t, dt, K);
        if (k < 0) {
            std::ostringstream os;
            os << "value_at: t = " << t << " is not a grid node of dt = " << dt
               << " (request interpolation explicitly for off-grid samples)";
            throw std::invalid_argument(os.str());
        }
        return values[static_cast<std::size_t>(k)];
    }

    auto k = static_cast<std::int64_t>(std::floor(t / dt));
    k = std::clamp<std::int64_t>(k, 0, K - 1);
    const double theta =
        std::clamp((t - static_cast<double>(k) * dt) / dt, 0.0, 1.0);
    return (1.0 - theta) * values[static_cast<std::size_t>(k)] +
           theta * values[static_cast<std::size_t>(k + 1)];
}

Trajectory solve_trajectory_coeffs(const ModelParams& params, const DerivedCoeffs& coeffs,
                                   double t_end, SchemeKind scheme,
                                   const ProgressFn& progress) {
    params.validate();
    if (!(coeffs.dt > 0.0) || !std::isfinite(coeffs.dt))
        throw std::invalid_argument("solve_trajectory: coeffs.dt must be positive");
    if (!(coeffs.delta > 0.0) || !std::isfinite(coeffs.delta))
        throw std::invalid_argument("solve_trajectory: coeffs.delta must be positive");
    if (!std::isfinite(coeffs.alpha) || !std::isfinite(coeffs.beta))
        throw std::invalid_argument("solve_trajectory: non-finite coefficients");

    const std::int64_t K = grid_step_count(coeffs.dt, t_end);
    constexpr std::int64_t progress_stride = 4096;

    Trajectory traj;
    traj.params = params;
    traj.scheme = scheme;
    traj.dt = coeffs.dt;
    traj.values.reserve(static_cast<std::size_t>(K) + 1);
    traj.values.push_back(params.a0);

    LogRatioTable table(coeffs.delta);
    for (std::int64_t k = 1; k <= K; ++k) {
        table.extend_to(k);
        const QuadraticStep step =
            k == 1 ? assemble_first_step(coeffs, traj.values[0])
                   : assemble_general_step(coeffs, scheme, traj.values, k, table);
        traj.values.push_back(solve_positive_root(step));
        if (progress && (k % progress_stride == 0 || k == K)) progress(k, K);
    }
    return traj;
}

Trajectory solve_trajectory(const ModelParams& params, double dt, double t_end,
                            SchemeKind scheme, const ProgressFn& progress) {
    return solve_trajectory_coeffs(params, derive_coeffs(params, dt), t_end, scheme, progress);
}

std::vector<Trajectory> solve_ladder(const ModelParams& params, std::span<const double> dts,
                                     double t_end, SchemeKind scheme, int threads) {
    if (threads < 1) throw std::invalid_argument("solve_ladder: threads must be >= 1");

    std::vector<Trajectory> out(dts.size());
    if (dts.empty()) return out;

    const int workers = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(threads), dts.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < dts.size(); ++i)
            out[i] = solve_trajectory(params, dts[i], t_end, scheme);
        return out;
    }

    std::vector<std::exception_ptr> errors(dts.size());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < dts.size();
                 i += static_cast<std::size_t>(workers)) {
                try {
                    out[i] = solve_trajectory(params, dts[i], t_end, scheme);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return out;
}

} // namespace annkin
