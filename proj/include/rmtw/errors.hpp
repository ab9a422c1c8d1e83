#pragma once

#include <stdexcept>
#include <string>

namespace rmtw {

enum class ErrorKind {
    Parse,
    CauchyViolation,
    MixedKinds,
    DisjointnessViolation,
    OutOfDomain,
    PointNotInDomain,
    InstanceViolation,
    Stalled,
    Degenerate,
    OverlappingPieces,
    PlanDepthExceeded,
    EvalBudgetExceeded,
    CoverContractViolation,
    Io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::CauchyViolation: return "CauchyViolation";
        case ErrorKind::MixedKinds: return "MixedKinds";
        case ErrorKind::DisjointnessViolation: return "DisjointnessViolation";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::PointNotInDomain: return "PointNotInDomain";
        case ErrorKind::InstanceViolation: return "InstanceViolation";
        case ErrorKind::Stalled: return "Stalled";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::OverlappingPieces: return "OverlappingPieces";
        case ErrorKind::PlanDepthExceeded: return "PlanDepthExceeded";
        case ErrorKind::EvalBudgetExceeded: return "EvalBudgetExceeded";
        case ErrorKind::CoverContractViolation: return "CoverContractViolation";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace rmtw
