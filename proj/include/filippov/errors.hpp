#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace filippov {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the domain of a subexpression (1/0, ln of non-positive, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an analysis does not hold for the given input.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Integration or root finding failed (step underflow, divergence, no return).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid system file or analysis settings. Line/column are 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : Error(line == 0 ? message
                          : message + " (line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace filippov
