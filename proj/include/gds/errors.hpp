#pragma once

#include <stdexcept>
#include <string>

namespace gds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Induced metric has a zero off-diagonal entry; quotient the instance first.
class SeparationFailure : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class MarginalMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleMarginals : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class WitnessNotLipschitz : public Error {
 public:
  using Error::Error;
};

class NotLipschitzFamily : public Error {
 public:
  using Error::Error;
};

class EmptyCellSet : public Error {
 public:
  using Error::Error;
};

class EmptyFamily : public Error {
 public:
  using Error::Error;
};

// A dataset document does not follow the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace gds
