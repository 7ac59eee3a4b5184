#pragma once

#include <stdexcept>
#include <string>

namespace wassmob {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define WASSMOB_ERROR(Name)                    \
    struct Name : Error {                      \
        using Error::Error;                    \
    }

WASSMOB_ERROR(NonPositiveMobility);
WASSMOB_ERROR(AnchorMissing);
WASSMOB_ERROR(NotSPD);
WASSMOB_ERROR(NotDiagonal);
WASSMOB_ERROR(UnsupportedMobility);
WASSMOB_ERROR(GridMismatch);
WASSMOB_ERROR(InfeasibleMarginals);
WASSMOB_ERROR(SizeExceeded);
WASSMOB_ERROR(DimensionMismatch);
WASSMOB_ERROR(NotInvertible);
WASSMOB_ERROR(ContinuityViolated);
WASSMOB_ERROR(SingularOperator);
WASSMOB_ERROR(ConstraintViolated);
WASSMOB_ERROR(MissingDuals);
WASSMOB_ERROR(MissingMap);
WASSMOB_ERROR(EmptyRow);
WASSMOB_ERROR(UnsupportedAnisotropy);
WASSMOB_ERROR(SolverFailure);
WASSMOB_ERROR(NoConvergence);
WASSMOB_ERROR(ParseError);
WASSMOB_ERROR(ValidationError);
WASSMOB_ERROR(IOError);

#undef WASSMOB_ERROR

}  // namespace wassmob
