#pragma once

#include <stdexcept>
#include <string>

namespace annkin {

/// Numerical breakdown during stepping or post-processing (negative
/// discriminant, loss of positivity, fit divergence). Carries a message
/// with the step index and offending quantities; never thrown for bad
/// arguments, which use std::invalid_argument.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace annkin
