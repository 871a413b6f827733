#pragma once

#include <stdexcept>
#include <string>

namespace mtbandit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: non-finite inputs, dimension mismatches, empty candidate sets.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A structure failed its own invariants (asymmetric or indefinite coupling matrix, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation only defined for a particular multi-task kernel variant.
class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

/// Numerical failure that should be impossible for valid inputs.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace mtbandit
