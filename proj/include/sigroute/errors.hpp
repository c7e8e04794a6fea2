#pragma once

#include <stdexcept>
#include <string>

namespace sigroute {

// Base of every error raised by the library. Callers that only care about
// "something in the model went wrong" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// u_i = 1 requested while the pre-decision length of queue i is 0.
class InfeasibleAction : public Error {
 public:
  using Error::Error;
};

// Bayes conditioning on an event the belief assigns zero mass to.
class ZeroProbabilityEvent : public Error {
 public:
  using Error::Error;
};

class NegativeSupport : public Error {
 public:
  using Error::Error;
};

class InvalidPmf : public Error {
 public:
  using Error::Error;
};

// Policy outside the catalog asked to drive a common-information update.
class UnsupportedConditioning : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, unsigned long long size)
      : Error(what + " (size " + std::to_string(size) + ")"), size_(size) {}
  unsigned long long size() const noexcept { return size_; }

 private:
  unsigned long long size_;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class ReducibleChain : public Error {
 public:
  using Error::Error;
};

class DivergingCost : public Error {
 public:
  using Error::Error;
};

// A pathwise relation that must hold by construction was violated.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An error raised inside a simulated path, tagged with where it happened.
class SimulationError : public Error {
 public:
  SimulationError(long long replication, int step, const std::string& what)
      : Error("replication " + std::to_string(replication) + ", step " + std::to_string(step) + ": " + what),
        replication_(replication),
        step_(step) {}
  long long replication() const noexcept { return replication_; }
  int step() const noexcept { return step_; }

 private:
  long long replication_;
  int step_;
};

}  // namespace sigroute
