#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

// Base class for all library errors. Subclasses map onto CLI exit codes:
// invariant violations exit 1, usage errors exit 2, validation errors exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter or input failed its documented precondition.
struct ValidationError : Error {
    using Error::Error;
};

// A mathematical invariant that should hold by construction failed.
// Treated as build-stopping: something is wrong with the inputs or the code.
struct InvariantError : Error {
    using Error::Error;
};

struct SingularityError : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyInteriorError : ValidationError {
    using ValidationError::ValidationError;
};

struct StencilOverflowError : ValidationError {
    using ValidationError::ValidationError;
};

struct SupportOverflowError : ValidationError {
    using ValidationError::ValidationError;
};

struct PaddingTooSmallError : ValidationError {
    using ValidationError::ValidationError;
};

struct GridMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct NyquistExceededError : ValidationError {
    using ValidationError::ValidationError;
};

struct ZeroGradientError : ValidationError {
    using ValidationError::ValidationError;
};

struct NonFiniteError : InvariantError {
    using InvariantError::InvariantError;
};

struct NonpositiveQhatError : InvariantError {
    using InvariantError::InvariantError;
};

struct LineSearchFailureError : InvariantError {
    using InvariantError::InvariantError;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace nlc
