#pragma once

#include <stdexcept>
#include <string>

namespace gbulab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition or model hypothesis was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed or mismatched serialized data (snapshots, trajectory files).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to produce a usable answer
/// (non-convergence, exhausted bisection, non-finite values).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Run configuration is missing keys, has unknown keys, or violates a hypothesis.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionError(what);
}

} // namespace gbulab
