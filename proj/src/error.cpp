#include "mapruin/error.hpp"

#include <sstream>

namespace mapruin {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonConservativeRows: return "NonConservativeRows";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::ZeroRate: return "ZeroRate";
        case ErrorCode::BadMixture: return "BadMixture";
        case ErrorCode::SingularSolve: return "SingularSolve";
        case ErrorCode::AbscissaExceeded: return "AbscissaExceeded";
        case ErrorCode::SpectralClash: return "SpectralClash";
        case ErrorCode::EmptyMinus: return "EmptyMinus";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DriftPositive: return "DriftPositive";
        case ErrorCode::DriftNonNegative: return "DriftNonNegative";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::NotMinusState: return "NotMinusState";
        case ErrorCode::DomainExceeded: return "DomainExceeded";
        case ErrorCode::SingularBlock: return "SingularBlock";
        case ErrorCode::BadGrid: return "BadGrid";
        case ErrorCode::HorizonTooShort: return "HorizonTooShort";
        case ErrorCode::HasJumps: return "HasJumps";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::NonConservativeRows:
        case ErrorCode::Reducible:
        case ErrorCode::ZeroRate:
        case ErrorCode::BadMixture:
            return true;
        default:
            return false;
    }
}

namespace {

std::string join(const std::vector<ValidationError::Diagnostic>& diags) {
    std::ostringstream os;
    for (std::size_t k = 0; k < diags.size(); ++k) {
        if (k) os << "; ";
        os << to_string(diags[k].code) << ": " << diags[k].message;
    }
    return os.str();
}

ErrorCode first_code(const std::vector<ValidationError::Diagnostic>& diags) {
    return diags.empty() ? ErrorCode::ParseError : diags.front().code;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(first_code(diagnostics), join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace mapruin
