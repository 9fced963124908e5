#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plcbandit {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (unknown key, wrong type, violated constraint).
class ConfigError : public Error
{
public:
    ConfigError(const std::string& message, std::size_t line = 0)
        : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message)
        , line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Mismatched frequency grids, wrong hop counts and similar shape errors.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Overflow, singularity or other non-finite numerical result.
class ComputationError : public Error
{
public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// select/observe called out of order.
class SequencingError : public Error
{
public:
    using Error::Error;
};

} // namespace plcbandit
