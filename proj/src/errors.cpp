#include "kinf/types.hpp"

namespace kinf {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::NotBisectable: return "NotBisectable";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorKind::QuadratureInsufficient: return "QuadratureInsufficient";
    case ErrorKind::NearSingular: return "NearSingular";
    case ErrorKind::AlphaNotZero: return "AlphaNotZero";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    }
    return "Unknown";
}

}  // namespace kinf
