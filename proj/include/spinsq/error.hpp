#pragma once

#include <stdexcept>
#include <string>

namespace spinsq {

enum class ErrorKind {
  Config,       // malformed or invalid configuration
  Domain,       // argument outside an operation's domain
  Accuracy,     // a numerical accuracy check failed
  Convergence,  // an iterative solver did not converge
  Regime,       // physical regime not supported (instability, no crossing, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string &what) {
  if (!condition) throw Error(kind, what);
}

/// Process exit code used by the command-line tool for each error kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::Accuracy:
    case ErrorKind::Convergence:
      return 3;
    case ErrorKind::Regime:
      return 4;
  }
  return 1;
}

}  // namespace spinsq
