#pragma once

#include <stdexcept>
#include <string>

namespace vlnc {

enum class ErrorKind {
    CompositeCharacteristic,
    InvalidDegree,
    FieldMismatch,
    DivisionByZero,
    ShapeError,
    UnsupportedDomain,
    NotDisjoint,
    NoSuchNode,
    NoSuchEdge,
    InconsistentCode,
    IncompleteCode,
    InvalidArg,
    IncompleteRank,
    NotPolymatroid,
    NotASolution,
    IncompleteMap,
    SpaceTooLarge,
    ParseError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace vlnc
