#pragma once

#include <stdexcept>
#include <string>

namespace mixdil {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MIXDIL_ERROR(Name)                 \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

MIXDIL_ERROR(SingularMatrix);
MIXDIL_ERROR(NotExpansive);
MIXDIL_ERROR(DimensionMismatch);
MIXDIL_ERROR(NotSublattice);
MIXDIL_ERROR(ShapeMismatch);
MIXDIL_ERROR(FormatError);
MIXDIL_ERROR(InvariantViolation);
MIXDIL_ERROR(UnknownName);
MIXDIL_ERROR(PeriodNotDivisible);
MIXDIL_ERROR(EnvelopeExceeded);
MIXDIL_ERROR(MaskDiagnosticFailed);
MIXDIL_ERROR(Diverged);

#undef MIXDIL_ERROR

}  // namespace mixdil
