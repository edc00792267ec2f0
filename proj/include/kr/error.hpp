#pragma once

#include <stdexcept>
#include <string>

namespace kr {

/// Malformed or invalid input (bad document, violated precondition).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The problem has no feasible solution (disconnected supply, unbalanced
/// transport, uncertifiable truncation).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical verification or certificate check failed.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kr
