#include "segfuse/error.hpp"

namespace segfuse {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyVolume: return "EmptyVolume";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::ConstantVolume: return "ConstantVolume";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::PlanMismatch: return "PlanMismatch";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::RadiiDontFit: return "RadiiDontFit";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnpairedCase: return "UnpairedCase";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

}  // namespace segfuse
