#pragma once

#include <stdexcept>
#include <string>

namespace robroc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data or out-of-domain requests (exit status 2).
class DataError : public Error {
public:
    using Error::Error;
};

/// Prediction requested outside the boundary knots of a covariate.
class ExtrapolationError : public DataError {
public:
    using DataError::DataError;
};

/// A numerical procedure could not produce a usable answer (exit status 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or arguments (exit status 1).
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace robroc
