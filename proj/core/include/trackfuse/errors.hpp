#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trackfuse {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an operation's input was violated.
struct InvalidInput : Error {
    using Error::Error;
};

/// Configuration or dataset layout problem (missing file, bad field).
struct ConfigError : Error {
    using Error::Error;
};

/// File content could not be parsed; carries the byte offset of the failure.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset = 0;
};

/// An external adapter process failed.
struct AdapterError : Error {
    AdapterError(const std::string& what, int code, std::string output)
        : Error(what), exit_code(code), captured_output(std::move(output)) {}
    int exit_code = 0;
    std::string captured_output;
};

/// A numerical routine failed to converge or hit a degenerate case.
struct NumericError : Error {
    using Error::Error;
};

} // namespace trackfuse
