#pragma once

#include <stdexcept>
#include <string>

namespace detline {

// Error taxonomy mirrors the CLI exit-code contract:
//   ValidationError / DomainError -> exit 1 (bad or out-of-domain input)
//   NumericalError and subclasses -> exit 2 (the computation refuses to guess)

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition failures on otherwise well-formed data, e.g. a regularizer
// that does not make T+A invertible, or a non-transversal chart triple.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rank or principal-angle detection landed inside the declared ambiguity
// band; the caller must change the tolerance or the input.
class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A winding/phase accumulation step was too large to be trustworthy;
// the caller must refine the grid.
class UndersampledError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace detline
