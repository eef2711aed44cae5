#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gazelink {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the source name and, for line-oriented
/// formats, the 1-based line number (0 when not applicable).
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Input that parsed but violates a domain invariant (unknown id, bad geometry, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace gazelink
