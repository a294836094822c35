#pragma once

#include <stdexcept>
#include <string>

namespace sigtree {

/// Base class of every error the library raises on a contract violation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands disagree on dimension or step, or a block has the wrong size.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// dim^step exceeds the per-level coefficient budget.
class MemoryGuardError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the domain of the operation (scalar part, range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed JSON or a document that does not match the expected schema.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace sigtree
