#ifndef EMBEVAL_ERROR_HPP
#define EMBEVAL_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace embeval {

enum class ErrorCode {
    // ingestion
    MagicMismatch,
    DimensionMismatch,
    NonFiniteValue,
    IdCountMismatch,
    IoFailure,
    ParseError,
    InvariantViolation,
    // curation
    EmptyResult,
    TooFewMembers,
    // clustering / classification
    KTooLarge,
    LengthMismatch,
    DimMismatch,
    KExceedsTrain,
    UnknownClass,
    EmptyClass,
    // reduction
    FitDiverged,
    NonFiniteCoordinate,
    // harness
    NonFiniteInput,
    MissingEvents,
    RegistryMiss,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. `index()` carries the row, line,
/// class or count the message refers to when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what,
          std::optional<std::size_t> index = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace embeval

#endif  // EMBEVAL_ERROR_HPP
