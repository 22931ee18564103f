#pragma once

#include <stdexcept>
#include <string>

namespace spslab {

enum class ErrorKind {
  invalid_argument,
  unsupported,
  singular,
  double_critical,
  one_dimensional,
  eigenvalue_critical,
  nonconvergence,
  boundary_mass,
  capacity,
  assertion,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace spslab
