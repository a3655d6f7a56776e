#pragma once

#include <stdexcept>
#include <string>

namespace kpm {

/// Raised when an input file or string cannot be parsed (malformed CSV row,
/// unreadable number, missing header, ...). Carries a human-readable message
/// that includes the offending row number where applicable.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when parsed input violates a domain invariant (unknown security id,
/// nonpositive quantity, prior that does not normalize, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical solve fails to converge or detects an
/// inconsistency that signals a modeling bug.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kpm
