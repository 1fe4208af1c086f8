#pragma once

#include <stdexcept>
#include <string>

namespace pinnlab {

/// Base class for all pinnlab failures so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when tensor shapes are incompatible with the requested operation.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

/// Raised for invalid or inconsistent run configurations / CLI input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Raised when a forward pass or optimizer step produces non-finite values.
/// `where` identifies the failing layer (forward) or iteration (training).
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long where)
        : Error(what), where_(where) {}
    long where() const noexcept { return where_; }

private:
    long where_;
};

/// Raised when a reference solver or quadrature fails to converge.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace pinnlab
