#pragma once

#include <stdexcept>
#include <string>

namespace onoff {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define ONOFF_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

ONOFF_DEFINE_ERROR(NonPositiveRate);
ONOFF_DEFINE_ERROR(BadDimension);
ONOFF_DEFINE_ERROR(NonPositiveEpsilon);
ONOFF_DEFINE_ERROR(InvalidArgument);
ONOFF_DEFINE_ERROR(PopulationCapExceeded);
ONOFF_DEFINE_ERROR(MissingDerivative);
ONOFF_DEFINE_ERROR(NonConvergent);
ONOFF_DEFINE_ERROR(CFLViolation);
ONOFF_DEFINE_ERROR(BoundaryLeak);
ONOFF_DEFINE_ERROR(OutOfBall);
ONOFF_DEFINE_ERROR(ContractionViolated);
ONOFF_DEFINE_ERROR(NoConvergence);
ONOFF_DEFINE_ERROR(NonPositiveLambda);
ONOFF_DEFINE_ERROR(IoError);

#undef ONOFF_DEFINE_ERROR

}  // namespace onoff
