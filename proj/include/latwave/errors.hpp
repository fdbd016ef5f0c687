#ifndef LATWAVE_ERRORS_HPP
#define LATWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latwave {

// Error categories map onto CLI exit codes: validation -> 1,
// numerical -> 2, io -> 3.
enum class ErrorKind { Validation, Numerical, Io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

#define LATWAVE_DEFINE_ERROR(Name, Kind)                         \
  class Name : public Error {                                    \
  public:                                                        \
    explicit Name(const std::string& msg)                        \
        : Error(ErrorKind::Kind, msg) {}                         \
  }

LATWAVE_DEFINE_ERROR(InvalidArgument, Validation);
LATWAVE_DEFINE_ERROR(NonPositiveParameter, Validation);
LATWAVE_DEFINE_ERROR(SubcriticalTransmission, Validation);
LATWAVE_DEFINE_ERROR(SpeedNotSupercritical, Validation);
LATWAVE_DEFINE_ERROR(TruncationTooSmall, Validation);
LATWAVE_DEFINE_ERROR(BadGrid, Validation);
LATWAVE_DEFINE_ERROR(KinkTooClose, Validation);
LATWAVE_DEFINE_ERROR(BadWidth, Validation);
LATWAVE_DEFINE_ERROR(StepTooLarge, Validation);

LATWAVE_DEFINE_ERROR(ToleranceNotReached, Numerical);
LATWAVE_DEFINE_ERROR(SelectionFailed, Numerical);
LATWAVE_DEFINE_ERROR(SandwichViolation, Numerical);
LATWAVE_DEFINE_ERROR(MaxIterExceeded, Numerical);
LATWAVE_DEFINE_ERROR(MonotonicityBroken, Numerical);
LATWAVE_DEFINE_ERROR(SequenceNotCauchy, Numerical);
LATWAVE_DEFINE_ERROR(PositivityLost, Numerical);
LATWAVE_DEFINE_ERROR(FrontNotFound, Numerical);
LATWAVE_DEFINE_ERROR(FrontHitBoundary, Numerical);

LATWAVE_DEFINE_ERROR(IoError, Io);

#undef LATWAVE_DEFINE_ERROR

} // namespace latwave

#endif
