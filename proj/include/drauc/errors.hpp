#pragma once

#include <stdexcept>
#include <string>

namespace drauc {

/// Invalid user-facing configuration (bad flags, malformed config file,
/// unknown keys). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (CSV parse failures, dimension
/// mismatches, empty classes). CLI exit code 1.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure inside a solver that could not be resolved into an
/// explicit status. CLI exit code 1.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace drauc
