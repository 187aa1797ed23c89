#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgp {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  NonFinite,
  InvalidParams,
  GapClosure,
  TrackingAmbiguity,
  OutOfRange,
  UndefinedArg,
  SingularPoint,
  NotClosed,
  DegenerateCoupling,
  StepUnderflow,
  NotAntisymmetric,
  MatchingAmbiguity,
  Inapplicable,
  GridMismatch,
  DegenerateA,
  OutOfRegime,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a named kind so callers
/// (notably the CLI) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qgp
