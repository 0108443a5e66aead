#include "annkin/stepper.hpp"

#include "annkin/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace annkin {

SchemeKind scheme_from_order(int order) {
    if (order == 1) return SchemeKind::FirstOrder;
    if (order == 2) return SchemeKind::SecondOrder;
    throw std::invalid_argument("scheme order must be 1 or 2, got " + std::to_string(order));
}

namespace detail {

NewestSegmentExpansion NewestSegmentExpansion::from_delta(double delta) {
    NewestSegmentExpansion e;
    e.log_ratio = annkin::log_ratio(1, delta);
    const double op = 1.0 + delta;
    e.quad = op * op * e.log_ratio - (1.5 + delta);
    e.lin = 2.0 * delta + 1.0 - 2.0 * op * delta * e.log_ratio;
    e.constant = 0.5 - delta + delta * delta * e.log_ratio;
    return e;
}

double history_tail_sum(std::int64_t k, double delta, std::span<const double> history,
                        const LogRatioTable* table) {
    KahanSum acc;
    for (std::int64_t i = 0; i <= k - 2; ++i) {
        const std::int64_t j = k - i;
        const double m = static_cast<double>(j) + delta;
        const double lr = table ? table->at(j) : log_ratio(j, delta);
        acc.add(segment_value(m, lr, history[static_cast<std::size_t>(i)],
                              history[static_cast<std::size_t>(i + 1)]));
    }
    return acc.value();
}

} // namespace detail

namespace {

void check_history(SchemeKind scheme, std::span<const double> history, std::int64_t k) {
    const std::int64_t need = scheme == SchemeKind::SecondOrder ? 2 : 1;
    if (k < need)
        throw std::invalid_argument("stepper: order " + std::to_string(scheme_order(scheme)) +
                                    " needs k >= " + std::to_string(need) + ", got k=" +
                                    std::to_string(k));
    if (static_cast<std::int64_t>(history.size()) != k)
        throw std::invalid_argument("stepper: history must hold a_0..a_{k-1} (size " +
                                    std::to_string(k) + "), got " +
                                    std::to_string(history.size()));
}

QuadraticStep assemble_impl(const DerivedCoeffs& coeffs, SchemeKind scheme,
                            std::span<const double> history, std::int64_t k,
                            const LogRatioTable* table) {
    check_history(scheme, history, k);

    const auto e = detail::NewestSegmentExpansion::from_delta(coeffs.delta);
    const double a_prev = history[static_cast<std::size_t>(k - 1)];
    // beta = 0 annihilates every memory term, so the O(k) tail sum is skipped.
    const double tail =
        coeffs.beta == 0.0 ? 0.0 : detail::history_tail_sum(k, coeffs.delta, history, table);

    QuadraticStep step;
    step.k = k;
    step.A = coeffs.alpha - coeffs.beta * e.quad;
    if (scheme == SchemeKind::SecondOrder) {
        const double a_prev2 = history[static_cast<std::size_t>(k - 2)];
        step.B = 1.5 / coeffs.dt - coeffs.beta * a_prev * e.lin;
        step.C = -(4.0 * a_prev - a_prev2) / (2.0 * coeffs.dt) -
                 coeffs.beta * a_prev * a_prev * e.constant - coeffs.beta * tail;
    } else {
        step.B = 1.0 / coeffs.dt - coeffs.beta * a_prev * e.lin;
        step.C = -a_prev / coeffs.dt - coeffs.beta * a_prev * a_prev * e.constant -
                 coeffs.beta * tail;
    }
    return step;
}

} // namespace

QuadraticStep assemble_first_step(const DerivedCoeffs& coeffs, double a0) {
    if (!std::isfinite(a0) || a0 < 0.0)
        throw std::invalid_argument("assemble_first_step: a0 must be finite and >= 0");
    const auto e = detail::NewestSegmentExpansion::from_delta(coeffs.delta);
    QuadraticStep step;
    step.k = 1;
    step.A = coeffs.alpha - coeffs.beta * e.quad;
    step.B = 1.0 / coeffs.dt - coeffs.beta * a0 * e.lin;
    step.C = -a0 / coeffs.dt - coeffs.beta * a0 * a0 * e.constant;
    return step;
}

QuadraticStep assemble_general_step(const DerivedCoeffs& coeffs, SchemeKind scheme,
                                    std::span<const double> history, std::int64_t k) {
    return assemble_impl(coeffs, scheme, history, k, nullptr);
}

QuadraticStep assemble_general_step(const DerivedCoeffs& coeffs, SchemeKind scheme,
                                    std::span<const double> history, std::int64_t k,
                                    const LogRatioTable& table) {
    return assemble_impl(coeffs, scheme, history, k, &table);
}

double solve_positive_root(const QuadraticStep& step) {
    const double A = step.A, B = step.B, C = step.C;
    if (!(std::isfinite(A) && std::isfinite(B) && std::isfinite(C)))
        throw std::invalid_argument("solve_positive_root: non-finite coefficients");

    auto describe = [&](const char* what) {
        std::ostringstream os;
        os << "solve_positive_root: " << what << " at k=" << step.k << " (A=" << A
           << ", B=" << B << ", C=" << C << ")";
        return os.str();
    };

    if (A == 0.0) {
        if (B == 0.0) {
            if (C == 0.0) return 0.0;
            throw NumericError(describe("degenerate equation has no root"));
        }
        const double root = -C / B;
        if (root < 0.0) throw NumericError(describe("loss of positivity (linear)"));
        return root;
    }

    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw NumericError(describe("negative discriminant (scheme breakdown)"));

    const double s = B >= 0.0 ? 1.0 : -1.0;
    const double q = -0.5 * (B + s * std::sqrt(disc));
    if (q == 0.0) return 0.0;  // B = 0 and disc = 0, so C = 0: double root at zero

    const double r1 = q / A;
    const double r2 = C / q;
    const double root = r1 > r2 ? r1 : r2;
    if (root < 0.0) throw NumericError(describe("loss of positivity (both roots negative)"));
    return root;
}

double step_residual(const DerivedCoeffs& coeffs, SchemeKind scheme,
                     std::span<const double> history, double a_k) {
    const std::int64_t k = static_cast<std::int64_t>(history.size());
    check_history(scheme, history, k);

    double deriv;
    const double a_prev = history[static_cast<std::size_t>(k - 1)];
    if (scheme == SchemeKind::SecondOrder) {
        const double a_prev2 = history[static_cast<std::size_t>(k - 2)];
        deriv = (3.0 * a_k - 4.0 * a_prev + a_prev2) / (2.0 * coeffs.dt);
    } else {
        deriv = (a_k - a_prev) / coeffs.dt;
    }
    const double msum = memory_sum(k, coeffs.delta, history, a_k);
    return deriv + coeffs.alpha * a_k * a_k - coeffs.beta * msum;
}

} // namespace annkin
