#pragma once

#include <stdexcept>
#include <string>

namespace nnls {

/// Failure categories shared by the library and the command line driver.
enum class ErrorKind {
  Input,        // malformed configuration or data
  Domain,       // argument outside the documented domain of an operation
  Pole,         // argument sits on a pole (e.g. Gamma at a non-positive integer)
  Overflow,     // result not representable
  Envelope,     // outside the supported evaluation envelope
  Convergence,  // series / quadrature / iteration failed to converge
  StepUnderflow,
  NonDecayed,   // profile not decayed at the window ends
  ZeroOnGrid,   // a1 or a2 vanishes where it is divided by
  PhaseStep,    // unwrapping step too large for the grid
  Assumption,   // hypotheses of the asymptotic formula violated
  Boundary,     // field reached the edge of the periodic window
  BlowUp,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace nnls
