#pragma once

#include <stdexcept>
#include <string>

namespace mla {

/// Input violates a documented precondition (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation failed: non-finite state, eigensolver failure, lost bracket (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form bound was evaluated outside the domain where its log bracket is positive.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mla
