#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specflow {

/// Malformed input text (OFF files, CSV, config).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input that parses but violates a precondition or a structural invariant.
/// `index` names the offending simplex/entry when there is one, otherwise -1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what, long index = -1)
        : std::runtime_error(index >= 0 ? what + " [index " + std::to_string(index) + "]" : what),
          index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// A numerical guard or tolerance was breached (stability guard, quadrature
/// non-convergence, spectral tail bound).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace specflow
