#include "dppgeo/errors.hpp"

namespace dppgeo {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace dppgeo
