#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mapruin {

/// Failure categories surfaced by the library. The CLI maps them to exit
/// codes: parse/validation kinds exit 2, everything else exits 1.
enum class ErrorCode {
    // model validation / ingestion
    ParseError,
    NonConservativeRows,
    Reducible,
    ZeroRate,
    BadMixture,
    // numerical failures
    SingularSolve,
    AbscissaExceeded,
    SpectralClash,
    EmptyMinus,
    NoConvergence,
    DriftPositive,
    DriftNonNegative,
    NoRoot,
    NotMinusState,
    DomainExceeded,
    SingularBlock,
    BadGrid,
    HorizonTooShort,
    HasJumps,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for the error kinds that describe a bad input model or file.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Thrown by model validation; carries every violated invariant, not just the
/// first one found.
class ValidationError : public Error {
public:
    struct Diagnostic {
        ErrorCode code;
        std::string message;
    };

    explicit ValidationError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace mapruin
