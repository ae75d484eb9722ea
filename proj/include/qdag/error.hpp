#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network or Q-DAG text. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A network that violates one of its structural or numeric invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Reference to an unknown variable or value, or an out-of-range number.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evidence with probability zero; posteriors cannot be normalized.
class InconsistentEvidence : public Error {
public:
    using Error::Error;
};

/// The brute-force oracle refuses joint spaces above its cap.
class StateSpaceTooLarge : public Error {
public:
    using Error::Error;
};

}  // namespace qdag
