#pragma once

#include <stdexcept>
#include <string>

namespace qstar {

/// A parameter violates a type invariant or a theorem's validity predicate.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested outside the region where the quantity is defined
/// (|z| >= 1, a vanishing denominator, z = 0 without a series form).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two independent evaluation routes disagree beyond their tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qstar
