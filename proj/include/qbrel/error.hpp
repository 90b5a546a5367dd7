#pragma once

#include <stdexcept>
#include <string>

namespace qbrel {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, grid, or scenario parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Hilbert space larger than the configured qubit cap.
class ResourceCapError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invariant violated by a numerical result (non-Hermitian product, failed
/// eigensolver, imaginary expectation value, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace qbrel
