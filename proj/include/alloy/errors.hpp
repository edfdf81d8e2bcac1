#pragma once

#include <stdexcept>
#include <string>

namespace alloy {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on user-supplied data was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A disorder sample does not contain a coupling that contributes to the potential.
class CoverageError : public Error {
public:
    using Error::Error;
};

// The spectral parameter is (numerically) an eigenvalue.
class SpectralCollision : public Error {
public:
    SpectralCollision(const std::string& what, double distance)
        : Error(what), distance_(distance) {}
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

// A numerical routine failed to meet its accuracy contract.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace alloy
