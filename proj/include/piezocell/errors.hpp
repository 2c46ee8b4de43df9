#pragma once

#include <stdexcept>
#include <string>

namespace piezocell {

// Base class for all failures raised by this library. Subclasses distinguish
// bad user input (ConfigError), numerically impossible requests (compute
// errors), and certificate violations detected after a computation finished.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent run configuration / input files.
struct ConfigError : Error {
    using Error::Error;
};

// A dynamically-sized input (JSON matrix, raw mask, field import) has the
// wrong dimensions for the operation.
struct ShapeMismatch : ConfigError {
    using ConfigError::ConfigError;
};

// A nominally symmetric matrix input violates symmetry beyond tolerance.
struct NonSymmetricInput : ConfigError {
    using ConfigError::ConfigError;
};

// Geometry construction removed every voxel.
struct AllVoid : Error {
    using Error::Error;
};

// The material region is not a single periodically-connected component.
struct DisconnectedGeometry : Error {
    using Error::Error;
};

// Randomized probe found a negative Rayleigh quotient in a block that must be
// positive semidefinite (bad material data reached assembly).
struct NonPositiveBlock : Error {
    using Error::Error;
};

// Linear solver failed to reach the requested residual.
struct SolverBreakdown : Error {
    using Error::Error;
};

// Point evaluation requested inside a void voxel.
struct VoidPoint : Error {
    using Error::Error;
};

// Two fields / grids that must share a discretization do not.
struct GridMismatch : Error {
    using Error::Error;
};

// A hole intersects the closed boundary of the unit cell where the
// full-domain problem requires material (perforations must be interior).
struct HoleTouchesBoundary : Error {
    using Error::Error;
};

// A post-solve certificate (energy balance, residual bound, structural
// identity) failed.
struct CertificateFailure : Error {
    using Error::Error;
};

} // namespace piezocell
