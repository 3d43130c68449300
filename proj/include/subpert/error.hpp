#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subpert {

enum class ErrorCode {
    NonHermitianInput,
    ConvergenceFailure,
    IndexOutOfRange,
    EmptyComponent,
    AmbiguousMembership,
    EnclosureViolation,
    InvalidInterval,
    BracketFailure,
    DomainError,
    GapConditionViolated,
    InfeasibleConstraint,
    DimensionMismatch,
    InvalidSpec,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyComponent: return "EmptyComponent";
    case ErrorCode::AmbiguousMembership: return "AmbiguousMembership";
    case ErrorCode::EnclosureViolation: return "EnclosureViolation";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GapConditionViolated: return "GapConditionViolated";
    case ErrorCode::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

} // namespace subpert
