#pragma once

#include <stdexcept>
#include <string>

namespace yamabe {

// Violated mathematical hypothesis or malformed input. CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Evaluation point outside a tabulated function's grid.
class OutOfDomainError : public std::domain_error {
public:
    explicit OutOfDomainError(const std::string& what) : std::domain_error(what) {}
};

// Linear solve or quadrature failed to reach the requested tolerance.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

// Two independent evaluation paths of the same quantity disagree.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// Bad config file or command line.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace yamabe
