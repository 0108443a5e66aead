#pragma once

// Per-step implicit solve. Substituting the finite-difference derivative and
// the product-integrated memory sum into the model equation leaves, at every
// step k, one quadratic equation
//
//   A a_k^2 + B a_k + C = 0
//
// whose newest-segment contribution has been expanded symbolically in a_k.
// The first step always uses the first-order derivative (the second-order
// formula needs two back values).

#include "annkin/model.hpp"
#include "annkin/quadrature.hpp"

#include <cstdint>
#include <span>

namespace annkin {

/// Order of the backward-difference derivative formula.
enum class SchemeKind : int {
    FirstOrder = 1,   ///< (a_k - a_{k-1}) / dt
    SecondOrder = 2,  ///< (3 a_k - 4 a_{k-1} + a_{k-2}) / (2 dt)
};

/// Throws std::invalid_argument unless order is 1 or 2.
SchemeKind scheme_from_order(int order);

inline int scheme_order(SchemeKind s) { return static_cast<int>(s); }

/// Standard-form coefficients of the step-k equation.
/// In the paper's regime (alpha > 0, small beta corrections, positive
/// decreasing history): A > 0, B > 0, C < 0, so exactly one root is positive.
struct QuadraticStep {
    double A = 0.0;  ///< coefficient of a_k^2, 1/(density*time)
    double B = 0.0;  ///< coefficient of a_k, 1/time
    double C = 0.0;  ///< constant term, density/time
    std::int64_t k = 0;
};

namespace detail {

/// Expansion of the newest history segment (m = 1 + delta) in powers of a_k:
///   S(k, k-1) = quad * a_k^2 + lin * a_{k-1} * a_k + constant * a_{k-1}^2.
struct NewestSegmentExpansion {
    double log_ratio = 0.0;  ///< ln((1+delta)/delta)
    double quad = 0.0;       ///< (1+delta)^2 L - (3/2 + delta)
    double lin = 0.0;        ///< 2 delta + 1 - 2 (1+delta) delta L
    double constant = 0.0;   ///< 1/2 - delta + delta^2 L

    static NewestSegmentExpansion from_delta(double delta);
};

/// Sum of the fully known segments i = 0..k-2 (empty for k = 1), compensated,
/// oldest first. If table is non-null it must cover j = 1..k.
double history_tail_sum(std::int64_t k, double delta, std::span<const double> history,
                        const LogRatioTable* table);

} // namespace detail

/// Step k = 1 from a_0 alone (first-order derivative; no known segments).
QuadraticStep assemble_first_step(const DerivedCoeffs& coeffs, double a0);

/// Step k >= 2 for the second-order scheme, k >= 1 for the first-order one.
/// history holds a_0..a_{k-1} (size k). The overload with a LogRatioTable is
/// arithmetic-identical and skips the per-segment logs; the table must cover
/// j = 1..k.
QuadraticStep assemble_general_step(const DerivedCoeffs& coeffs, SchemeKind scheme,
                                    std::span<const double> history, std::int64_t k);
QuadraticStep assemble_general_step(const DerivedCoeffs& coeffs, SchemeKind scheme,
                                    std::span<const double> history, std::int64_t k,
                                    const LogRatioTable& table);

/// Returns the positive root via the cancellation-safe two-root formula
///   q = -(B + sign(B) sqrt(B^2 - 4AC)) / 2,  roots q/A and C/q.
/// A == 0 falls back to the linear solution -C/B. A zero root is accepted
/// (zero density stays zero). Throws NumericError on a negative discriminant
/// or when no root is >= 0, reporting k and the coefficients.
double solve_positive_root(const QuadraticStep& step);

/// Residual of the unrearranged step equation at a candidate a_k:
///   derivative + alpha a_k^2 - beta * memory_sum(k, ..., a_k).
/// The memory sum here includes the newest segment evaluated at the
/// candidate, making this an independent check of the assembled form.
double step_residual(const DerivedCoeffs& coeffs, SchemeKind scheme,
                     std::span<const double> history, double a_k);

} // namespace annkin
