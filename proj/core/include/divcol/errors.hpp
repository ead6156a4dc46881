#pragma once

#include <stdexcept>
#include <string>

namespace divcol {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-increasing breakpoints, length mismatches, bad radii, ...
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Evaluation point outside the knot range / parametric domain.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// Degree below what the requested operation supports.
class UnsupportedDegree : public Error {
public:
    using Error::Error;
};

/// Singular trace-interpolation or DOF bookkeeping failure during system setup.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Geometry map with non-positive Jacobian at a sample or collocation point.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// Numerically singular linear system (pivot below threshold or factorization failure).
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Newton iteration failed: divergence or max-iters without meeting tolerance.
class SolveFailure : public Error {
public:
    enum class Kind { Divergence, MaxIterations, SingularJacobian };
    SolveFailure(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Reference data file missing or malformed.
class MalformedData : public Error {
public:
    using Error::Error;
};

} // namespace divcol
