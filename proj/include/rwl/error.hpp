#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rwl {

enum class ErrorCode {
    SubcriticalExponent,
    NonpositiveScale,
    GridTooSmall,
    BadInterval,
    DomainTooSmall,
    CausalWindowExceeded,
    NegativeRadius,
    ConeLeftDomain,
    DecayViolated,
    BadRadius,
    CFLViolation,
    CausalClosureViolated,
    PreconditionViolated,
    ZeroEll,
    SeriesRegionExceeded,
    BlowupEncountered,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SubcriticalExponent: return "SubcriticalExponent";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::CausalWindowExceeded: return "CausalWindowExceeded";
    case ErrorCode::NegativeRadius: return "NegativeRadius";
    case ErrorCode::ConeLeftDomain: return "ConeLeftDomain";
    case ErrorCode::DecayViolated: return "DecayViolated";
    case ErrorCode::BadRadius: return "BadRadius";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::CausalClosureViolated: return "CausalClosureViolated";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ZeroEll: return "ZeroEll";
    case ErrorCode::SeriesRegionExceeded: return "SeriesRegionExceeded";
    case ErrorCode::BlowupEncountered: return "BlowupEncountered";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) throw Error(code, what);
}

} // namespace rwl
