#ifndef CFGQM_ERRORS_HPP
#define CFGQM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfgqm {

/// Every failure raised by the library derives from Error so callers can
/// catch one type, and the CLI can map the concrete kind onto an exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define CFGQM_DEFINE_ERROR(Name, Label)                 \
  class Name : public Error {                           \
  public:                                               \
    using Error::Error;                                 \
    const char* kind() const noexcept override {        \
      return Label;                                     \
    }                                                   \
  };

// Invalid grid, config key or value.
CFGQM_DEFINE_ERROR(ConfigError, "configuration error")
// Unknown scenario kind in a config or on the command line.
CFGQM_DEFINE_ERROR(UnknownScenarioError, "unknown scenario")
// Packet widths below the grid resolution floor.
CFGQM_DEFINE_ERROR(ResolutionError, "resolution error")
// Packet support too close to a periodic seam, or a wrap-budget violation.
CFGQM_DEFINE_ERROR(DomainError, "domain error")
// Non-finite amplitudes.
CFGQM_DEFINE_ERROR(DataError, "data error")
// Mismatched grids.
CFGQM_DEFINE_ERROR(ShapeError, "shape error")
CFGQM_DEFINE_ERROR(ArgumentError, "argument error")
CFGQM_DEFINE_ERROR(PreconditionError, "precondition error")
CFGQM_DEFINE_ERROR(NumericError, "numeric error")
// Dense spectral work above the size cap.
CFGQM_DEFINE_ERROR(ResourceError, "resource error")
// Unwritable or unreadable files.
CFGQM_DEFINE_ERROR(IoError, "io error")

#undef CFGQM_DEFINE_ERROR

}  // namespace cfgqm

#endif  // CFGQM_ERRORS_HPP
