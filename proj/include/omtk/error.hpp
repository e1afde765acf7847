#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omtk {

enum class ErrorCode {
    // constraint-core
    DuplicateName,
    InvalidBounds,
    InvalidName,
    UnknownVariable,
    NonBinaryLiteral,
    EmptyMemberList,
    MissingValue,
    Overflow,
    // omt-tree
    NotInternal,
    UnknownAnswer,
    MissingSlot,
    KindMismatch,
    UnknownNode,
    Unclassifiable,
    // implicit-maps
    UnknownMapping,
    BadParams,
    TooLarge,
    // lowering
    UnboundedVariable,
    ValidationFailed,
    // oracle
    BoxTooLarge,
    ContinuousUnsupported,
    // emitters
    NonDecimalCoefficient,
    SchemaMismatch,
    MalformedDocument,
    UnsupportedDialect,
    ParseError,
    // corpus
    UnknownCase,
    ScaleTooLarge,
    // service / cli
    SessionNotFound,
    AtLeaf,
    CapacityExceeded,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the toolkit surfaces as an Error carrying a stable code.
/// `subject` names the offending variable, constraint, node or file when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string subject = {});

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::string_view code_name() const { return to_string(code_); }
    [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

} // namespace omtk
