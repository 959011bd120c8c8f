#pragma once

#include <stdexcept>
#include <string>

namespace qzrp {

// Invalid model parameters or request fields. CLI exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Float-backend result failed the P / 2P agreement check, or an identity
// that must vanish exactly was not small enough. CLI exit code 3.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finder, power iteration, or linear solve did not converge. CLI exit code 4.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qzrp
