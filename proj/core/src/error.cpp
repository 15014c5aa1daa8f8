#include "embeval/error.hpp"

namespace embeval {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MagicMismatch: return "MagicMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::IdCountMismatch: return "IdCountMismatch";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::EmptyResult: return "EmptyResult";
        case ErrorCode::TooFewMembers: return "TooFewMembers";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::KExceedsTrain: return "KExceedsTrain";
        case ErrorCode::UnknownClass: return "UnknownClass";
        case ErrorCode::EmptyClass: return "EmptyClass";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::MissingEvents: return "MissingEvents";
        case ErrorCode::RegistryMiss: return "RegistryMiss";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      index_(index) {}

}  // namespace embeval
