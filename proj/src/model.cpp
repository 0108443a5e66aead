#include "annkin/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace annkin {

void ModelParams::validate() const {
    auto bad = [](const std::string& what) {
        throw std::invalid_argument("ModelParams: " + what);
    };
    if (!(std::isfinite(lambda) && lambda >= 0.0)) bad("lambda must be finite and >= 0");
    if (!(std::isfinite(diffusion) && diffusion > 0.0)) bad("diffusion must be finite and > 0");
    if (!(std::isfinite(ell) && ell >= 0.0)) bad("ell must be finite and >= 0");
    if (!(std::isfinite(a0) && a0 > 0.0)) bad("a0 must be finite and > 0");
}

DerivedCoeffs derive_coeffs(const ModelParams& params, double dt) {
    params.validate();
    if (!(std::isfinite(dt) && dt > 0.0))
        throw std::invalid_argument("derive_coeffs: dt must be finite and > 0");
    if (params.ell == 0.0)
        throw std::invalid_argument(
            "derive_coeffs: ell = 0 gives delta = 0 (unregularized, divergent kernel)");

    DerivedCoeffs c;
    c.alpha = 2.0 * params.lambda * params.diffusion;
    c.beta  = c.alpha * c.alpha / (8.0 * std::numbers::pi * params.diffusion);
    c.gamma = params.ell * params.ell / params.diffusion;
    c.delta = c.gamma / dt;
    c.dt    = dt;
    return c;
}

} // namespace annkin
