#pragma once

// Closed-form product integration of the memory kernel.
//
// On the segment [i*dt, (i+1)*dt] the squared piecewise-linear interpolant of
// the density integrates exactly against the kernel 1/(t_k - t' + gamma).
// With m = k + delta - i, c = m*a_{i+1} - (m-1)*a_i and d = a_{i+1} - a_i the
// segment contributes
//
//   S(k,i) = c^2 * ln(m/(m-1)) - (m + 1/2) d^2 - 2 a_i d,
//
// a density^2 quantity independent of the step size. The full history sum is
// the reduction over i = 0..k-1. Sums run oldest-segment first with
// compensated accumulation, so results are deterministic and order-robust to
// about one ulp.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace annkin {

/// Compensated (Kahan) accumulator, Neumaier variant: the correction term is
/// kept separately so it survives addends larger than the running sum.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

/// ln((j + delta) / (j - 1 + delta)) for integer segment distance j = k - i >= 1.
/// Evaluated via log1p so that far segments (tiny ratios) keep full precision.
double log_ratio(std::int64_t j, double delta);

/// Per-segment weight bundle: the log factor tied to (k, i, delta).
struct SegmentWeights {
    std::int64_t k = 0;
    std::int64_t i = 0;
    double delta = 0.0;
    double log_ratio = 0.0;

    /// Validates 0 <= i <= k-1 and delta > 0 (which makes the log argument > 1).
    static SegmentWeights make(std::int64_t k, std::int64_t i, double delta);
};

/// Exact integral of the squared linear interpolant over segment i of the
/// history of step k. Throws std::invalid_argument on i < 0, i >= k or
/// delta <= 0, and on non-finite densities.
double segment_integral(std::int64_t k, std::int64_t i, double delta,
                        double a_i, double a_ip1);

/// Reference evaluator of the full history sum at step k:
///   Sum_{i=0}^{k-1} S(k, i)  with  a_k = a_k_candidate.
/// history holds a_0..a_{k-1} (size k >= 1). Used by residual checks; the
/// stepper splits off the i = k-1 segment symbolically instead.
double memory_sum(std::int64_t k, double delta, std::span<const double> history,
                  double a_k_candidate);

/// Growing table of log_ratio values for one fixed delta. Step k needs
/// j = 1..k; step k+1 reuses all of them plus one new entry, so the table is
/// extended incrementally and the inner stepping loop does no logs at all.
class LogRatioTable {
public:
    explicit LogRatioTable(double delta) : delta_(delta) {}

    /// Ensures entries for j = 1..j_max exist.
    void extend_to(std::int64_t j_max) {
        while (static_cast<std::int64_t>(table_.size()) < j_max)
            table_.push_back(log_ratio(static_cast<std::int64_t>(table_.size()) + 1, delta_));
    }

    /// Precondition: extend_to(j) has been called.
    double at(std::int64_t j) const { return table_[static_cast<std::size_t>(j - 1)]; }

    double delta() const { return delta_; }

private:
    double delta_;
    std::vector<double> table_;
};

namespace detail {

/// g(m) = (m - 1/2) - 1/ln(m/(m-1)), the offset of the kernel-weighted mean
/// of the segment from its midpoint; lies in (0, 1/2) and falls off like
/// 1/(12m). The direct form cancels two O(m) quantities, so far segments use
/// the series in y = 1/(2m-1) instead (next omitted term is below 1e-17 of
/// the leading one at m >= 20).
inline double center_offset(double m, double lr) {
    if (m < 20.0) return (m - 0.5) - 1.0 / lr;
    const double y = 1.0 / (2.0 * m - 1.0);
    const double z = y * y;
    return y * (1.0 / 6.0 +
                z * (2.0 / 45.0 +
                     z * (22.0 / 945.0 +
                          z * (214.0 / 14175.0 + z * (5098.0 / 467775.0)))));
}

/// Segment value from precomputed pieces; m = k + delta - i, lr = ln(m/(m-1)).
/// Equal to c^2*lr - (m + 1/2)*d^2 - 2*a_i*d with c = m*d + a_i, but that
/// arrangement loses ~6 digits on far segments with large slopes. Grouping
/// around the kernel-weighted mean e keeps every term nonnegative whenever
/// the densities are.
inline double segment_value(double m, double lr, double a_i, double a_ip1) {
    const double d = a_ip1 - a_i;
    if (d == 0.0) return a_i * a_i * lr;
    const double g = center_offset(m, lr);
    const double e = (0.5 - g) * a_i + (0.5 + g) * a_ip1;
    return e * e * lr + d * d * g;
}

} // namespace detail

} // namespace annkin
