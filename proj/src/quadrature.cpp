#include "annkin/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace annkin {

double log_ratio(std::int64_t j, double delta) {
    // ln((j+d)/(j-1+d)) = log1p(1/(j-1+d)); j-1+d > 0 for j >= 1, d > 0.
    return std::log1p(1.0 / (static_cast<double>(j - 1) + delta));
}

namespace {

void check_segment_args(std::int64_t k, std::int64_t i, double delta) {
    if (i < 0 || i >= k)
        throw std::invalid_argument("segment_integral: need 0 <= i <= k-1, got k=" +
                                    std::to_string(k) + " i=" + std::to_string(i));
    if (!(delta > 0.0))
        throw std::invalid_argument("segment_integral: delta must be > 0 (unregularized kernel)");
}

} // namespace

SegmentWeights SegmentWeights::make(std::int64_t k, std::int64_t i, double delta) {
    check_segment_args(k, i, delta);
    return SegmentWeights{k, i, delta, annkin::log_ratio(k - i, delta)};
}

double segment_integral(std::int64_t k, std::int64_t i, double delta,
                        double a_i, double a_ip1) {
    check_segment_args(k, i, delta);
    if (!(std::isfinite(a_i) && std::isfinite(a_ip1)))
        throw std::invalid_argument("segment_integral: densities must be finite");
    const std::int64_t j = k - i;
    const double m = static_cast<double>(j) + delta;
    return detail::segment_value(m, log_ratio(j, delta), a_i, a_ip1);
}

double memory_sum(std::int64_t k, double delta, std::span<const double> history,
                  double a_k_candidate) {
    if (history.empty())
        throw std::invalid_argument("memory_sum: empty history");
    if (static_cast<std::int64_t>(history.size()) != k)
        throw std::invalid_argument("memory_sum: history must hold a_0..a_{k-1}, size k=" +
                                    std::to_string(k));
    KahanSum acc;
    for (std::int64_t i = 0; i < k - 1; ++i)
        acc.add(segment_integral(k, i, delta, history[static_cast<std::size_t>(i)],
                                 history[static_cast<std::size_t>(i + 1)]));
    acc.add(segment_integral(k, k - 1, delta, history[static_cast<std::size_t>(k - 1)],
                             a_k_candidate));
    return acc.value();
}

} // namespace annkin
