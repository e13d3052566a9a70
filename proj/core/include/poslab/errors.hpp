#pragma once

#include <stdexcept>
#include <string>

namespace poslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's documented domain (bad exponent, bad interval, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An operation was called on input that does not satisfy its hypothesis,
/// e.g. a smoothing request for a function that is not a certified subsolution.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Discretization or solver failure: singular systems, nonpositive ground
/// states on coarse grids, stagnating iterations.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace poslab
