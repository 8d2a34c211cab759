#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skplane {

enum class ErrorCode {
    MalformedRow,
    DuplicateKey,
    MissingColumn,
    InsufficientData,
    NonPositiveValue,
    InvalidArgument,
    ZeroVariance,
    TooShort,
    EmptyInput,
    EmptyPanel,
    NonFiniteValue,
    RankDeficient,
    TooFewRows,
    TooFewGroups,
    UnknownTerm,
    SingularSubcovariance,
    WrongEstimator,
    InvalidConfig,
    Singular,
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace skplane
