#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dppgeo {

enum class ErrorKind {
  shape,         // malformed matrix or mismatched sizes
  domain,        // value outside the model's parameter domain
  capacity,      // enumeration cap exceeded
  convergence,   // iterative solver did not converge
  precondition,  // caller-side contract violation
  degenerate,    // singular metric / rank deficiency
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
  throw Error(kind, detail);
}

}  // namespace dppgeo
