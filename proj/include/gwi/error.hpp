#pragma once

#include <stdexcept>
#include <string>

namespace gwi {

// Root of the library's exception hierarchy. The CLI maps each leaf onto a
// distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Scenario text could not be read (line/field context in the message).
class ParseError : public Error {
public:
    using Error::Error;
};

// Scenario parsed but violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Numerical failure: invalid output coefficients, overflow, non-convergence.
class NumericError : public Error {
public:
    using Error::Error;
};

// An infinite series required by a limit-law constructor does not converge.
class SeriesDivergence : public NumericError {
public:
    using NumericError::NumericError;
};

// A series expansion produced coefficients that are not a distribution.
class NotADistribution : public NumericError {
public:
    using NumericError::NumericError;
};

// The scenario is in a regime where the requested object does not exist.
class WrongRegime : public Error {
public:
    using Error::Error;
};

class UnsupportedFamily : public Error {
public:
    using Error::Error;
};

} // namespace gwi
