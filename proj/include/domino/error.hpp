#pragma once

#include <stdexcept>
#include <string>

namespace domino {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  AsymmetricNetwork,
  IntegrationFault,
  NoConvergence,
  SingularJacobian,
  DegenerateDenominator,
  BoundaryNotBracketed,
  EmptyConditional,
  NotAGate,
  WrongRegime,
  MissingEquilibrium,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI,
// the Python bindings) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IntegrationFault : public Error {
 public:
  IntegrationFault(double time, const std::string& what)
      : Error(ErrorKind::IntegrationFault, what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace domino
