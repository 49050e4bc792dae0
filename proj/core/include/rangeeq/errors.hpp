#pragma once

#include <stdexcept>
#include <string>

namespace rangeeq {

/// Input outside the mathematical domain of an operation (degenerate range,
/// non-finite argument, non-positive scale).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A price that no finite argument of the truncated mean can produce.
class OutOfImageError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Market parameters that violate the model setup.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The optimum of a grid search sat on the bracket edge.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rangeeq
