#pragma once

#include <stdexcept>
#include <string>

namespace intorder {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid or shape mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition (e.g. non-symmetric operator).
class ContractViolation : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to converge, or a non-finite value appeared.
class NumericError : public Error {
public:
    using Error::Error;
};

// Long-run variance quadratic form is zero: the statistic is undefined.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

// Malformed input file (ragged rows, bad cells, transform domain).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace intorder
