#ifndef GTF_ERRORS_HPP
#define GTF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gtf {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration, missing file, malformed input. CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical / degeneracy problems. CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

struct DegenerateGeometryError : NumericalError {
  using NumericalError::NumericalError;
};

struct InsufficientPointsError : NumericalError {
  using NumericalError::NumericalError;
};

struct CorrespondenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct InsufficientDataError : NumericalError {
  using NumericalError::NumericalError;
};

// A measurement with a non-Ok status was passed where only valid ones belong.
struct RejectedMeasurementError : Error {
  using Error::Error;
};

struct OrderingError : Error {
  using Error::Error;
};

// Query outside the covered time span.
struct RangeError : Error {
  using Error::Error;
};

struct UninitializedError : Error {
  using Error::Error;
};

struct SyncTimeoutError : Error {
  using Error::Error;
};

struct ChannelBusyError : Error {
  using Error::Error;
};

struct WireFormatError : Error {
  using Error::Error;
};

struct AlignmentError : Error {
  using Error::Error;
};

}  // namespace gtf

#endif  // GTF_ERRORS_HPP
