#pragma once

#include <stdexcept>
#include <string>

namespace phi4 {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters that do not describe an admissible configuration.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Value outside its admissible window (no L-periodic snoidal wave, bad modulus, ...).
class OutOfRange : public InvalidParameters {
 public:
  using InvalidParameters::InvalidParameters;
};

/// Root bracket collapsed onto an endpoint of the modulus interval.
class ModulusAtBoundary : public InvalidParameters {
 public:
  using InvalidParameters::InvalidParameters;
};

/// A numerical self-check failed; indicates an assembly or tolerance bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class EigFailure : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

class SingularSystem : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

class IndexMismatch : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

/// The field left the blow-up ceiling during time stepping.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace phi4
