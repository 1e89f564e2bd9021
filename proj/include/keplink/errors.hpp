#pragma once

#include <stdexcept>
#include <string>

namespace keplink {

// Error categories map one-to-one onto CLI exit codes (see cli.hpp).
enum class ErrorKind {
  Input,       // malformed file, missing data, out-of-span ephemeris query
  Domain,      // argument outside the documented domain (rho <= 0, e >= 1, ...)
  Degenerate,  // geometry makes the elimination rank deficient
  Numerical,   // iteration failed to converge, conditioning check tripped
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

[[nodiscard]] inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace keplink
