#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ithum {

enum class ErrorCode {
    // geometry
    MisalignedInterface,
    DegenerateDomain,
    ObserverOutsideInner,
    EmptyControlRegion,
    InvalidArgument,
    // material
    NotSymmetric,
    NotElliptic,
    NonPositiveH,
    // discretization / solver
    ShapeMismatch,
    CflViolation,
    NonFiniteState,
    // multiplier
    RegionTooThin,
    // observability / hum
    EmptyEnsemble,
    NotConverged,
    InfeasibleTime,
    // oracle
    BudgetExceeded,
    // cli
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MisalignedInterface: return "MisalignedInterface";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::ObserverOutsideInner: return "ObserverOutsideInner";
    case ErrorCode::EmptyControlRegion: return "EmptyControlRegion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NonPositiveH: return "NonPositiveH";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::RegionTooThin: return "RegionTooThin";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InfeasibleTime: return "InfeasibleTime";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace ithum
