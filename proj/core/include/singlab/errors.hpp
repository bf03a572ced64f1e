#pragma once

#include <stdexcept>
#include <string>

namespace singlab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SINGLAB_DEFINE_ERROR(Name)              \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

SINGLAB_DEFINE_ERROR(DomainError);
SINGLAB_DEFINE_ERROR(IntegrabilityError);
SINGLAB_DEFINE_ERROR(QuadratureError);
SINGLAB_DEFINE_ERROR(RootFindError);
SINGLAB_DEFINE_ERROR(PositivityError);
SINGLAB_DEFINE_ERROR(WindowError);
SINGLAB_DEFINE_ERROR(SignError);
SINGLAB_DEFINE_ERROR(PreconditionError);
SINGLAB_DEFINE_ERROR(ConfigError);

/// Failures of the nonlinear strip solve. The CLI maps all of them to exit code 2.
SINGLAB_DEFINE_ERROR(SolverError);

class NonConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

class PositivityLoss : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularJacobian : public SolverError {
public:
    using SolverError::SolverError;
};

#undef SINGLAB_DEFINE_ERROR

}  // namespace singlab
