#include "annkin/analysis.hpp"

#include "annkin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace annkin {

namespace {

void check_triple(const Trajectory& coarse, const Trajectory& medium, const Trajectory& fine) {
    if (!(coarse.params == medium.params) || !(medium.params == fine.params))
        throw std::invalid_argument("order_estimate: trajectories have different parameters");
    if (coarse.scheme != medium.scheme || medium.scheme != fine.scheme)
        throw std::invalid_argument("order_estimate: trajectories have different schemes");
    if (coarse.dt != 2.0 * medium.dt || medium.dt != 2.0 * fine.dt) {
        std::ostringstream os;
        os << "order_estimate: step sizes " << coarse.dt << ", " << medium.dt << ", "
           << fine.dt << " are not in the exact ratio 1 : 1/2 : 1/4";
        throw std::invalid_argument(os.str());
    }
}

} // namespace

OrderEstimate order_estimate(const Trajectory& coarse, const Trajectory& medium,
                             const Trajectory& fine, double t) {
    check_triple(coarse, medium, fine);

    OrderEstimate est;
    est.t = t;
    est.dts = {coarse.dt, medium.dt, fine.dt};

    const double a_c = coarse.value_at(t);
    const double a_m = medium.value_at(t);
    const double a_f = fine.value_at(t);

    const double num = a_c - a_m;
    const double den = a_m - a_f;
    if (num != 0.0 && den != 0.0) {
        const double p = std::log2(std::abs(num / den));
        if (std::isfinite(p)) {
            est.p = p;
            est.defined = true;
        }
    }
    return est;
}

std::vector<OrderEstimate> order_series(const Trajectory& coarse, const Trajectory& medium,
                                        const Trajectory& fine, std::span<const double> ts) {
    std::vector<OrderEstimate> out;
    out.reserve(ts.size());
    for (const double t : ts) out.push_back(order_estimate(coarse, medium, fine, t));
    return out;
}

namespace {

struct LogSamples {
    std::vector<double> t;  // grid times in the window
    std::vector<double> y;  // ln a at those times
};

struct ProfiledFit {
    double intercept = 0.0;  // ln amplitude
    double slope = 0.0;      // -exponent
    double sse = 0.0;
};

/// Closed-form least squares of y against ln(t - shift).
ProfiledFit profile_at_shift(const LogSamples& s, double shift) {
    const auto n = static_cast<double>(s.t.size());
    double x_mean = 0.0, y_mean = 0.0;
    std::vector<double> x(s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        x[i] = std::log(s.t[i] - shift);
        x_mean += x[i];
        y_mean += s.y[i];
    }
    x_mean /= n;
    y_mean /= n;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double dx = x[i] - x_mean;
        const double dy = s.y[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw NumericError("power_law_fit: no spread in log(t - shift), fit is singular");

    ProfiledFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    // Summing squared residuals directly keeps the objective smooth near the
    // optimum; the algebraic form syy - slope*sxy has absolute noise of order
    // eps*syy, which is larger than the curvature of the valley.
    fit.sse = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double r = s.y[i] - (fit.intercept + fit.slope * x[i]);
        fit.sse += r * r;
    }
    return fit;
}

/// Golden-section minimum of f on [a, b] to absolute width tol.
template <class F>
double golden_min(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

FitResult power_law_fit(const Trajectory& traj, FitWindow window) {
    if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || !(window.lo < window.hi))
        throw std::invalid_argument("power_law_fit: window must satisfy lo < hi");
    if (window.lo < 0.0 || window.hi > traj.t_end() * (1.0 + 1e-12))
        throw std::invalid_argument("power_law_fit: window outside the trajectory range");

    const double dt = traj.dt;
    const auto k_lo = static_cast<std::int64_t>(std::ceil(window.lo / dt - 1e-7));
    const auto k_hi = static_cast<std::int64_t>(std::floor(window.hi / dt + 1e-7));
    if (k_hi - k_lo + 1 < 10)
        throw std::invalid_argument("power_law_fit: fewer than 10 grid points in the window");

    LogSamples s;
    s.t.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    s.y.reserve(s.t.capacity());
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double a = traj.values[static_cast<std::size_t>(k)];
        if (!(a > 0.0))
            throw std::invalid_argument("power_law_fit: non-positive density in the window");
        s.t.push_back(static_cast<double>(k) * dt);
        s.y.push_back(std::log(a));
    }

    const auto [y_lo, y_hi] = std::minmax_element(s.y.begin(), s.y.end());
    if (*y_hi - *y_lo <= 1e-9 * std::max(1.0, std::abs(*y_hi)))
        throw NumericError("power_law_fit: density is constant over the window, fit is ill-posed");

    // Coarse scan for the basin, then golden-section refinement. Shifts up to
    // one window length below zero are allowed; the upper bound stays clear of
    // t_lo so every log stays finite.
    const double width = window.hi - window.lo;
    const double s_min = -width;
    const double s_max = window.lo - 1e-3 * width;
    auto sse_at = [&](double shift) { return profile_at_shift(s, shift).sse; };

    std::vector<double> starts;
    for (int i = 0; i <= 40; ++i)
        starts.push_back(s_min + (s_max - s_min) * static_cast<double>(i) / 40.0);
    for (double cand = 0.0; cand <= 0.5 + 1e-12; cand += 0.1)
        if (cand >= s_min && cand <= s_max) starts.push_back(cand);

    double best_start = starts.front();
    double best_sse = sse_at(best_start);
    for (std::size_t i = 1; i < starts.size(); ++i) {
        const double v = sse_at(starts[i]);
        if (v < best_sse) {
            best_sse = v;
            best_start = starts[i];
        }
    }

    const double h = (s_max - s_min) / 40.0;
    const double lo_bracket = std::max(s_min, best_start - h);
    const double hi_bracket = std::min(s_max, best_start + h);
    const double shift = golden_min(sse_at, lo_bracket, hi_bracket, 1e-11);

    const double edge = 1e-6 * width;
    if (shift >= s_max - edge)
        throw NumericError("power_law_fit: optimal shift ran into the window edge (singular fit)");
    if (shift <= s_min + edge)
        throw NumericError("power_law_fit: no interior optimum (shift at the search boundary)");

    const ProfiledFit fit = profile_at_shift(s, shift);
    const double exponent = -fit.slope;
    if (!(exponent > 0.0))
        throw NumericError("power_law_fit: non-decaying data (exponent <= 0), fit is ill-posed");

    FitResult result;
    result.amplitude = std::exp(fit.intercept);
    result.shift = shift;
    result.exponent = exponent;
    result.window = window;

    constexpr double ln10 = 2.302585092994046;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double log_resid =
            std::abs(s.y[i] - (fit.intercept + fit.slope * std::log(s.t[i] - shift)));
        result.max_abs_log10_error = std::max(result.max_abs_log10_error, log_resid / ln10);
        const double a = std::exp(s.y[i]);
        const double model = result.amplitude * std::pow(s.t[i] - shift, -exponent);
        result.max_rel_error = std::max(result.max_rel_error, std::abs(a - model) / a);
    }
    return result;
}

RefinementTable refinement_values(std::span<const Trajectory> trajectories,
                                  std::span<const double> sample_times) {
    RefinementTable table;
    table.sample_times.assign(sample_times.begin(), sample_times.end());
    table.dts.reserve(trajectories.size());
    table.values.reserve(trajectories.size());
    for (const Trajectory& traj : trajectories) {
        table.dts.push_back(traj.dt);
        std::vector<double> row;
        row.reserve(sample_times.size());
        for (const double t : sample_times) row.push_back(traj.value_at(t));
        table.values.push_back(std::move(row));
    }
    return table;
}

RefinementTable refinement_table(const ModelParams& params, std::span<const double> dts,
                                 std::span<const double> sample_times, SchemeKind scheme,
                                 int threads) {
    RefinementTable table;
    table.sample_times.assign(sample_times.begin(), sample_times.end());
    if (dts.empty()) return table;
    if (sample_times.empty())
        throw std::invalid_argument("refinement_table: no sample times given");

    const double t_end = *std::max_element(sample_times.begin(), sample_times.end());
    const std::vector<Trajectory> runs = solve_ladder(params, dts, t_end, scheme, threads);
    return refinement_values(runs, sample_times);
}

} // namespace annkin
