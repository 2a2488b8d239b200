#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segfuse {

enum class ErrorKind {
    BadMagic,
    UnsupportedDtype,
    UnsupportedEncoding,
    TruncatedFile,
    InvalidLabel,
    InvalidArgument,
    EmptyVolume,
    OutOfBounds,
    ShapeMismatch,
    GeometryMismatch,
    ConstantVolume,
    IndexOutOfRange,
    PlanMismatch,
    EmptyList,
    EmptyMask,
    RadiiDontFit,
    ConfigError,
    UnpairedCase,
    IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so
// callers (and tests) can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace segfuse
