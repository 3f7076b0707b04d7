#pragma once

#include <stdexcept>
#include <string>

namespace bimef {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// File was readable but is not a supported raster.
class FormatError : public Error {
public:
    using Error::Error;
};

// Precondition violated by the caller (bad dimensions, k <= 0, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Iterative solve stopped at the iteration cap above the requested tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

}  // namespace bimef
