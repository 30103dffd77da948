#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tubtilt {

enum class ErrorCode {
    NonTubularWeights,
    InternalConsistency,
    NotSheafLike,
    SearchBoundExceeded,
    ChartInconsistent,
    NotExceptionalHere,
    BasisMismatch,
    ComplementNotFound,
    ComplementNotUnique,
    NotFirstObject,
    NotLastObject,
    NoFullPeriodSummand,
    CompanionNotFound,
    BudgetExhausted,
    PreconditionViolated,
    DuplicateSummand,
    WrongSummandCount,
    SyntaxError,
    ValidationError,
};

inline std::string_view error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonTubularWeights: return "NonTubularWeights";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::NotSheafLike: return "NotSheafLike";
    case ErrorCode::SearchBoundExceeded: return "SearchBoundExceeded";
    case ErrorCode::ChartInconsistent: return "ChartInconsistent";
    case ErrorCode::NotExceptionalHere: return "NotExceptionalHere";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::ComplementNotFound: return "ComplementNotFound";
    case ErrorCode::ComplementNotUnique: return "ComplementNotUnique";
    case ErrorCode::NotFirstObject: return "NotFirstObject";
    case ErrorCode::NotLastObject: return "NotLastObject";
    case ErrorCode::NoFullPeriodSummand: return "NoFullPeriodSummand";
    case ErrorCode::CompanionNotFound: return "CompanionNotFound";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DuplicateSummand: return "DuplicateSummand";
    case ErrorCode::WrongSummandCount: return "WrongSummandCount";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

/// Domain error carrying a machine-readable code; the CLI maps these to
/// JSON diagnostics.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code), message_(what) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace tubtilt
