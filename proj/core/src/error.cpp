#include "skplane/error.hpp"

namespace skplane {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateKey: return "DuplicateKey";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyPanel: return "EmptyPanel";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::TooFewGroups: return "TooFewGroups";
        case ErrorCode::UnknownTerm: return "UnknownTerm";
        case ErrorCode::SingularSubcovariance: return "SingularSubcovariance";
        case ErrorCode::WrongEstimator: return "WrongEstimator";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace skplane
