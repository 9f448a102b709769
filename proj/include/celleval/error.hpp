#pragma once

#include <stdexcept>
#include <string>

namespace celleval {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input: files, ids, rasters, manifests.
// The CLI maps this to exit code 1.
struct InputError : Error {
    using Error::Error;
};

// Invalid parameter value (negative radius, zero iterations, ...).
// Also exit code 1 at the CLI.
struct ParamError : Error {
    using Error::Error;
};

// Coordinate outside the valid extent. Message names the offending axis.
struct BoundsError : InputError {
    using InputError::InputError;
};

} // namespace celleval
