#pragma once

#include <stdexcept>
#include <string>

namespace nccscat {

/// Base class for all library errors. Subclasses map onto the CLI exit codes.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent configuration input (exit code 2).
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

/// Convergence failure, step underflow, ill-conditioned solve (exit code 3).
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

/// Request outside the mathematical domain of an operation (exit code 4).
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

/// Point outside the geometrically valid region: self-crossing zone of the
/// coordinate system, degenerate metric, classically forbidden zone (exit code 4).
class region_error : public domain_error {
public:
    explicit region_error(const std::string& msg) : domain_error(msg) {}
};

} // namespace nccscat
