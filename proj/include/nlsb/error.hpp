#pragma once

#include <stdexcept>
#include <string>

namespace nlsb {

/// Failure categories. Each maps to a distinct CLI exit status.
enum class ErrorKind {
  Domain = 3,
  Bracket = 4,
  Convergence = 5,
  Geometry = 6,
  Positivity = 7,
  Shape = 8,
  Consistency = 9,
  LinearSolver = 10,
  Decomposition = 11,
  Spectral = 12,
  Config = 13,
  Io = 14,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace nlsb
