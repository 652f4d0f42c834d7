#pragma once

#include <stdexcept>
#include <string>

namespace tpflow {

/// Base class for all tpflow errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid run configuration or malformed input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Geometry preconditions violated (e.g. metric projection at the origin).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Height function outside the admissible tube, or the transformation lost
/// injectivity (theta' <= 0 or det grad(Theta) <= 0 somewhere).
class InterfaceValidityError : public Error {
public:
    using Error::Error;
};

/// Constitutive evaluator called outside its admissible domain.
class ConstitutiveDomainError : public Error {
public:
    using Error::Error;
};

/// OperatorContext no longer matches the height function it was built from.
class StaleContextError : public Error {
public:
    using Error::Error;
};

/// A direct linear solve failed (singular or non-finite factorization).
class LinearSolveError : public Error {
public:
    using Error::Error;
};

/// The per-step fixed-point iteration did not contract within its budget.
class FixedPointError : public Error {
public:
    using Error::Error;
};

/// Snapshot file is malformed, truncated, or from an incompatible grid.
class SnapshotError : public Error {
public:
    using Error::Error;
};

}  // namespace tpflow
