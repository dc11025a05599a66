#pragma once

#include <stdexcept>
#include <string>

namespace toda {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on mathematical input (edge sites, essential-spectrum z, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Runtime failure while integrating a flow; carries the time of first failure.
class FlowError : public Error {
 public:
  FlowError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace toda
