#pragma once

#include <stdexcept>
#include <string>

namespace cournot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (negative quantity, bad grid...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested point lies outside the feasible set (profit above monopoly,
/// exploration intensity that no decay rate can produce).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// The closed-form benchmark does not apply (corner Nash equilibrium).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A numerical solver could not bracket or reach its target.
class SolverFailure : public Error {
 public:
  SolverFailure(std::string label, std::string detail)
      : Error(label.empty() ? detail : label + ": " + detail),
        label_(std::move(label)),
        detail_(std::move(detail)) {}

  const std::string& label() const noexcept { return label_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string label_;
  std::string detail_;
};

/// Input data (files, directories, records) is missing or malformed.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Data required by an analysis was not recorded (e.g. Q-matrices of a run).
class Unavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace cournot
