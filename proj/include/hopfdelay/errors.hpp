#pragma once

#include <stdexcept>
#include <string>

namespace hopfdelay {

// Base for every failure the library reports. Callers that only need a
// message can catch this; the CLI maps the concrete types to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or flag combinations.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Feedback gain at or below the Hopf threshold (k <= alpha, or k <= 1).
class NoHopfError : public Error {
public:
    using Error::Error;
};

// |eps * omega| >= 1 on a branch whose delay is T0 / (1 - eps * omega).
class SeriesDivergenceError : public Error {
public:
    using Error::Error;
};

// Polar slow flow evaluated too close to R = 0.
class PolarSingularityError : public Error {
public:
    using Error::Error;
};

// Numerical failures: Newton divergence, singular steps, integration trouble,
// no stability change inside a bisection bracket.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double omega, double delay, double residual_norm)
        : NumericalError(what), omega(omega), delay(delay), residual_norm(residual_norm) {}

    double omega;
    double delay;
    double residual_norm;
};

class SingularStepError : public NumericalError {
public:
    SingularStepError(const std::string& what, double omega, double delay)
        : NumericalError(what), omega(omega), delay(delay) {}

    double omega;
    double delay;
};

class NoCrossingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AmbiguousClassificationError : public NumericalError {
public:
    AmbiguousClassificationError(const std::string& what, double delay)
        : NumericalError(what), delay(delay) {}

    double delay;
};

class InsufficientDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyReportError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hopfdelay
