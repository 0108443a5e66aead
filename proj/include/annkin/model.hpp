#pragma once

// Physical parameters of the annihilation kinetics initial value problem
//
//   da/dt = -alpha a^2 + beta * Int_0^t a^2(t') dt' / (t - t' + gamma)
//
// and the reduction of the (lambda, D, ell) inputs to the coefficient set
// (alpha, beta, gamma) plus the grid-relative regularization delta = gamma/dt.

#include <cstdint>

namespace annkin {

/// Physical inputs of the initial value problem.
/// All values are immutable after construction; safe to share across threads.
struct ModelParams {
    double lambda    = 0.0;  ///< reaction rate constant, 1/(density*time)
    double diffusion = 0.0;  ///< diffusion constant D, length^2/time
    double ell       = 0.0;  ///< regularization length, length
    double a0        = 0.0;  ///< initial density a(0)

    /// Throws std::invalid_argument naming the offending field.
    /// lambda may be zero (no reaction); ell may be zero here, but
    /// derive_coeffs rejects it because the unregularized kernel diverges.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Coefficients of the reduced equation on a fixed uniform grid.
///
///   alpha = 2 lambda D
///   beta  = alpha^2 / (8 pi D)
///   gamma = ell^2 / D
///   delta = gamma / dt
struct DerivedCoeffs {
    double alpha = 0.0;  ///< reaction coefficient, 1/(density*time)
    double beta  = 0.0;  ///< memory coefficient, 1/(density*time^2)
    double gamma = 0.0;  ///< regularization time
    double delta = 0.0;  ///< gamma expressed in units of the step
    double dt    = 0.0;  ///< time step

    bool operator==(const DerivedCoeffs&) const = default;
};

/// Builds the coefficient set for a given step size.
/// Throws std::invalid_argument on dt <= 0 or ell == 0 (delta would be 0,
/// i.e. the divergent unregularized kernel).
DerivedCoeffs derive_coeffs(const ModelParams& params, double dt);

} // namespace annkin
