#pragma once

#include <stdexcept>
#include <string>

namespace mlutd {

/// Argument outside the mathematical domain of an operation (u >= 1, t_n >= N, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid model parameter (theta < 1, negative tail index, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mismatched lengths or dimensions between paired inputs.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable information (zero total weight, empty intersection).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested combination is not supported by the chosen algorithm or backend.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Monte Carlo estimate failed its precision check.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          source_(source), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Series labels cannot be matched up (UTD pairs vs. price periods).
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mlutd
