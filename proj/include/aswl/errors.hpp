#pragma once

#include <stdexcept>
#include <string>

namespace aswl {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input / construction errors (CLI exit code 2).
struct InputError : Error {
    using Error::Error;
};
struct NotPrimeError : InputError {
    using InputError::InputError;
};
struct ReducibleModulusError : InputError {
    using InputError::InputError;
};
struct ForbiddenExponentError : InputError {
    using InputError::InputError;
};
struct DegreeDivisibleByPError : InputError {
    using InputError::InputError;
};
struct EmptyLevelZeroError : InputError {
    using InputError::InputError;
};
struct OutsideXError : InputError {
    using InputError::InputError;
};
struct ParseError : InputError {
    using InputError::InputError;
};
struct RelevantSetMismatchError : InputError {
    using InputError::InputError;
};
struct EmptySlopesError : InputError {
    using InputError::InputError;
};
struct ResourceLimitError : InputError {
    using InputError::InputError;
};

// Precision errors (CLI exit code 3).
struct PrecisionError : Error {
    using Error::Error;
};
struct SaturatedPrecisionError : PrecisionError {
    using PrecisionError::PrecisionError;
};
struct PrecisionHoleError : PrecisionError {
    using PrecisionError::PrecisionError;
};

// Internal consistency failures; seeing one of these is a bug.
struct InternalError : Error {
    using Error::Error;
};
struct TraceNotRationalError : InternalError {
    using InternalError::InternalError;
};
struct NonIntegralCoefficientError : InternalError {
    using InternalError::InternalError;
};
struct DegreeMismatchError : InternalError {
    using InternalError::InternalError;
};

}  // namespace aswl
