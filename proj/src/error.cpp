#include "omtk/error.hpp"

namespace omtk {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::NonBinaryLiteral: return "NonBinaryLiteral";
    case ErrorCode::EmptyMemberList: return "EmptyMemberList";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotInternal: return "NotInternal";
    case ErrorCode::UnknownAnswer: return "UnknownAnswer";
    case ErrorCode::MissingSlot: return "MissingSlot";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::Unclassifiable: return "Unclassifiable";
    case ErrorCode::UnknownMapping: return "UnknownMapping";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnboundedVariable: return "UnboundedVariable";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::BoxTooLarge: return "BoxTooLarge";
    case ErrorCode::ContinuousUnsupported: return "ContinuousUnsupported";
    case ErrorCode::NonDecimalCoefficient: return "NonDecimalCoefficient";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnsupportedDialect: return "UnsupportedDialect";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::ScaleTooLarge: return "ScaleTooLarge";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::AtLeaf: return "AtLeaf";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string subject)
    : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject))
{
}

} // namespace omtk
