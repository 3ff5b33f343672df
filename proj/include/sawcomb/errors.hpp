#pragma once

#include <stdexcept>
#include <string>

namespace sawcomb {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map them onto exit codes without listing each type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SAWCOMB_DEFINE_ERROR(Name)           \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(std::string(#Name ": ") + what) {} \
  };

SAWCOMB_DEFINE_ERROR(InvalidArgument)
SAWCOMB_DEFINE_ERROR(DegenerateMode)
SAWCOMB_DEFINE_ERROR(DimensionMismatch)
SAWCOMB_DEFINE_ERROR(SingularMatrix)
SAWCOMB_DEFINE_ERROR(InstabilityError)
SAWCOMB_DEFINE_ERROR(NonPhysicalInput)
SAWCOMB_DEFINE_ERROR(GainBelowUnity)
SAWCOMB_DEFINE_ERROR(NotPSD)
SAWCOMB_DEFINE_ERROR(EmptySamples)
SAWCOMB_DEFINE_ERROR(OptimizerFailure)
SAWCOMB_DEFINE_ERROR(MissingFitCovariance)
SAWCOMB_DEFINE_ERROR(ZeroVariance)
SAWCOMB_DEFINE_ERROR(FitDiverged)
SAWCOMB_DEFINE_ERROR(InsufficientData)
SAWCOMB_DEFINE_ERROR(NegativeNoise)
SAWCOMB_DEFINE_ERROR(ConfigError)
SAWCOMB_DEFINE_ERROR(NumericalError)

#undef SAWCOMB_DEFINE_ERROR

}  // namespace sawcomb
