#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperslice {

enum class ErrorCode {
    DegeneratePoints,
    BadAxisPair,
    InvalidPlane,
    InvalidParams,
    DegenerateCell,
    OriginVertex,
    BadVelocity,
    CollinearPoints,
    BadViewSpec,
    InvalidRequest,
    ParseError,
    IndexOutOfRange,
    Io,
    UnknownModel,
    Superseded,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised by the model reader; `line` is 1-based.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, std::size_t line, const std::string& reason)
        : Error(code, "line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason)
    {
    }

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

} // namespace hyperslice
