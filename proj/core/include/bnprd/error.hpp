#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bnprd {

enum class ErrorCode {
    // data
    EmptyInput,
    NonFiniteValue,
    OneSidedDesign,
    RaggedCovariates,
    MissingColumn,
    ParseError,
    DuplicateId,
    EmptySample,
    TraceTooShort,
    NoDraws,
    // configuration
    InvalidConfig,
    NonPositiveV,
    BasisMismatch,
    TooLarge,
    DomainError,
    // numerics
    SolveFailure,
    NumericalBreakdown,
    // environment
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Coarse grouping used to pick the process exit code.
enum class ErrorCategory { Config, Data, Numerical, Io };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& module, const std::string& what);

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorCode code_;
    std::string module_;
};

}  // namespace bnprd
