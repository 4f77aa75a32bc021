#pragma once

#include <stdexcept>
#include <string>

namespace qvc {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad variable lists, mismatched spaces,
// unparsable expressions, invalid job files.
struct InputError : Error {
  using Error::Error;
};

// Mathematically undefined operation: division by zero, evaluation at a
// pole, inverse of a zero series.
struct DomainError : Error {
  using Error::Error;
};

// A requested result is not determined by the data representable within the
// given window / degree cap / search depth.  Verdicts hitting this are
// "inconclusive at budget", never silently wrong.
struct BudgetError : Error {
  using Error::Error;
};

// Coefficient query outside a series' validity window.  Coefficients there
// are unknown, not zero.
struct UnknownCoefficientError : BudgetError {
  using BudgetError::BudgetError;
};

}  // namespace qvc
