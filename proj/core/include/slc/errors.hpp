#pragma once

#include <stdexcept>
#include <string>

namespace slc {

// Base of every error raised by the library. The CLI maps ConvergenceError to
// exit status 3 and everything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unsupported dimension, malformed input, unknown configuration key.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller-asserted hypothesis does not hold (e.g. A2 <= A, supersolution).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A shape operator that should be positive definite is not.
class NotConvexError : public Error {
public:
    NotConvexError(const std::string& what, long node = -1)
        : Error(what), node_(node) {}
    long node() const noexcept { return node_; }

private:
    long node_;
};

// First fundamental form is (numerically) degenerate.
class NotImmersedError : public Error {
public:
    using Error::Error;
};

// Riccati flow of a principal curvature blows up before the requested distance.
class FlowSingularityError : public Error {
public:
    FlowSingularityError(const std::string& what, double critical_distance)
        : Error(what), critical_distance_(critical_distance) {}
    double critical_distance() const noexcept { return critical_distance_; }

private:
    double critical_distance_;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace slc
