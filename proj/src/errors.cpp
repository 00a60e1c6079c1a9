#include "nnls/errors.hpp"

namespace nnls {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Envelope: return "envelope";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::StepUnderflow: return "step-underflow";
    case ErrorKind::NonDecayed: return "non-decayed";
    case ErrorKind::ZeroOnGrid: return "zero-on-grid";
    case ErrorKind::PhaseStep: return "phase-step";
    case ErrorKind::Assumption: return "assumption";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::BlowUp: return "blow-up";
  }
  return "unknown";
}

}  // namespace nnls
