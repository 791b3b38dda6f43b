#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exen {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input: empty samples, dimension
/// mismatches, out-of-range parameters.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A landmark configuration that collapses under preshaping (all points
/// coincide, so the centered vector has zero norm).
class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
};

/// The extrinsic mean is not well defined: the eigengap between the two
/// largest eigenvalues of the averaged projector is below tolerance.
class NonUniqueMeanError : public Error {
public:
    using Error::Error;
};

/// A numeric contract was violated at runtime, e.g. a metric produced a
/// non-finite or negative value. Never silently propagated.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Text-format errors; carries the 1-based line number where parsing failed.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace exen
