#pragma once

#include <stdexcept>

namespace ctfpw {

// Nonpositive physical parameters, non-finite inputs and similar.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A (kind, Fresnel number) combination without a generating function.
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Internal consistency of a generating-function construction is broken
// (duplicate zeros, vanishing derivative at a tabulated zero).
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DegenerateZeroError : public ConstructionError {
 public:
  using ConstructionError::ConstructionError;
};

// Evaluation requested outside the radius a truncated zero table supports.
class TruncationDomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Caller violated a documented precondition (misaligned arrays, etc).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data failed validation (phantom outside the support disc, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowGuardError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace ctfpw
