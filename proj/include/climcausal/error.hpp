#pragma once

#include <stdexcept>
#include <string>

namespace climcausal {

// Broad failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
  Config,     // bad configuration or precondition violated by the caller
  Data,       // malformed, missing or degenerate input data
  Numerical,  // factorization or estimator produced non-finite output
  Transport,  // network / remote service failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
    case ErrorKind::Transport: return 5;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace climcausal
