#pragma once

#include <stdexcept>
#include <string>

namespace hlcf {

/// Malformed input text (expressions, spec files, symbol strings).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos = 0)
        : std::runtime_error(what), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

/// A computation needed coefficients beyond the tracked precision.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A filtration bound M was too small for the requested answer.
class FiltrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mathematically invalid input: zero where a unit is needed, mismatched
/// parents, unsupported degree, and so on.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace hlcf
