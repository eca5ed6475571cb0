#include "bnprd/error.hpp"

namespace bnprd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::OneSidedDesign: return "OneSidedDesign";
    case ErrorCode::RaggedCovariates: return "RaggedCovariates";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::NoDraws: return "NoDraws";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonPositiveV: return "NonPositiveV";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::NonPositiveV:
    case ErrorCode::BasisMismatch:
    case ErrorCode::TooLarge:
    case ErrorCode::DomainError:
        return ErrorCategory::Config;
    case ErrorCode::SolveFailure:
    case ErrorCode::NumericalBreakdown:
        return ErrorCategory::Numerical;
    case ErrorCode::IoError:
        return ErrorCategory::Io;
    default:
        return ErrorCategory::Data;
    }
}

Error::Error(ErrorCode code, const std::string& module, const std::string& what)
    : std::runtime_error(module + ": " + std::string(to_string(code)) + ": " + what),
      code_(code),
      module_(module) {}

}  // namespace bnprd
