#ifndef GEOMAG_ERRORS_HPP
#define GEOMAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace geomag {

// Base class for all library failures so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid arguments: degree/order out of range, bad material contrast, ...
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A numeric requirement cannot be met (quadrature exactness, truncation).
struct PrecisionError : Error {
    explicit PrecisionError(const std::string& msg) : Error(msg) {}
};

// Evaluation at a singular point (kernel at r = 0, dipole source, ...).
struct SingularityError : Error {
    explicit SingularityError(const std::string& msg) : Error(msg) {}
};

// Mesh topology or quality failure.
struct MeshError : Error {
    explicit MeshError(const std::string& msg) : Error(msg) {}
};

// Resolvent requested at (or too close to) a spectral point of K*.
struct ResonanceError : Error {
    ResonanceError(const std::string& msg, double nearest)
        : Error(msg), nearest_eigenvalue(nearest) {}
    double nearest_eigenvalue;
};

// Scene or sampling geometry violation (radius too small, proximity, ...).
struct GeometryError : Error {
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// Samples do not cover the full sphere with a valid quadrature.
struct CoverageError : Error {
    explicit CoverageError(const std::string& msg) : Error(msg) {}
};

// File parse / format errors.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Optimizer did not converge; message carries best-so-far context.
struct OptimizationError : Error {
    explicit OptimizationError(const std::string& msg) : Error(msg) {}
};

} // namespace geomag

#endif
