#pragma once

#include <stdexcept>
#include <string>

namespace xkerr {

/// Raised for inputs that violate a documented precondition. The CLI maps
/// these to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a trustworthy answer.
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidRates : public InputError {
public:
    using InputError::InputError;
};

class NonPositive : public InputError {
public:
    using InputError::InputError;
};

class ZeroProbe : public InputError {
public:
    using InputError::InputError;
};

class SingularSystem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoDoublet : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateJacobian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace xkerr
