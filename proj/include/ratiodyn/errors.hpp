#pragma once

#include <stdexcept>
#include <string>

namespace ratiodyn {

/// Raised when a numerical procedure cannot produce a trustworthy answer
/// (as opposed to bad input, which raises std::invalid_argument).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two sign changes could not be separated at the requested resolution.
class inconclusive_roots : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// A periodic point whose image is not among the located periodic points.
class pairing_failure : public numerical_error {
public:
    using numerical_error::numerical_error;
};

} // namespace ratiodyn
