#include "spslab/error.hpp"

namespace spslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::singular: return "singular";
    case ErrorKind::double_critical: return "double_critical";
    case ErrorKind::one_dimensional: return "one_dimensional";
    case ErrorKind::eigenvalue_critical: return "eigenvalue_critical";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::boundary_mass: return "boundary_mass";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::assertion: return "assertion";
    case ErrorKind::io: return "io";
  }
  return "?";
}

}  // namespace spslab
