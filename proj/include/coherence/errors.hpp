#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coherence {

enum class ErrorKind {
    NotHyperbolic,
    ConditionViolated,
    GeometryInfeasible,
    NoConvergence,
    SampleDegenerate,
    TooCloseToSingularity,
    NoDecay,
    CertificationFailed,
    HorizonTooShort,
    InconsistentSigns,
    ConditionFails,
    DegenerateFit,
    InvalidConfig,
    IoError,
};

constexpr std::string_view error_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::GeometryInfeasible: return "GeometryInfeasible";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SampleDegenerate: return "SampleDegenerate";
    case ErrorKind::TooCloseToSingularity: return "TooCloseToSingularity";
    case ErrorKind::NoDecay: return "NoDecay";
    case ErrorKind::CertificationFailed: return "CertificationFailed";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::InconsistentSigns: return "InconsistentSigns";
    case ErrorKind::ConditionFails: return "ConditionFails";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code and name it in the run report.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

} // namespace coherence
