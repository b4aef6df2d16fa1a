#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace horizonbench {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed files, invalid arguments, unmet preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// A CSV row that failed to parse or validate. `row()` is the 1-based line
/// number in the source document (the header is line 1).
class ParseError : public InputError {
public:
    ParseError(std::size_t row, const std::string& what)
        : InputError("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Configuration file problems; the message names the offending key path.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical breakdown: rank deficiency, divergence, non-finite values.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Transport failure while talking to a data endpoint.
class NetworkError : public Error {
public:
    NetworkError(const std::string& what, int attempts)
        : Error(what), attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

}  // namespace detail
}  // namespace horizonbench
