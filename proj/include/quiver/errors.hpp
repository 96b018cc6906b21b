#pragma once

#include <stdexcept>
#include <string>

namespace quiver {

enum class ErrorCode {
    UnknownLabel,
    UnknownVertex,
    UnknownEdge,
    UnknownId,
    UnknownProperty,
    PropertyKindMismatch,
    ParseError,
    SchemaMismatch,
    NonCategoricalPartitionKey,
    SingleEdgePredicate,
    MissingPrimaryDirection,
    DuplicateName,
    UnknownIndex,
    IndexTooLarge,
    SortMismatch,
    UnboundVariable,
    NoPlan,
    InvalidOperation,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace quiver
