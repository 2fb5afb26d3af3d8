#pragma once

#include <stdexcept>

namespace abphase {

/// Raised when a numerical route cannot deliver the requested accuracy
/// (box too small, truncation too short, fit residual too large, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace abphase
