#pragma once

#include <stdexcept>
#include <string>

namespace mfcca {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad parameter, bad grid, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is well formed but carries no information the analysis can use
/// (constant prices, all-zero segment covariances, zero denominators).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// File could not be read or parsed.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace mfcca
