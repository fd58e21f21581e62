#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liouville {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed arguments, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string name, std::size_t offset, std::vector<std::string> known);

  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& known_symbols() const noexcept { return known_; }

 private:
  std::string name_;
  std::size_t offset_;
  std::vector<std::string> known_;
};

/// Evaluation left the domain of a sub-expression (log of a non-positive
/// value, division by zero, non-finite result).
class DomainError : public Error {
 public:
  DomainError(std::string node, double input);

  const std::string& node() const noexcept { return node_; }
  double input() const noexcept { return input_; }

 private:
  std::string node_;
  double input_;
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

/// A query fell outside the tabulated or sampled range of an object.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: overflow, non-finite values, divergence.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class WronskianViolation : public Error {
 public:
  WronskianViolation(std::string message, double drift);
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// F vanished where the solution must be evaluated.
class SingularSolution : public Error {
 public:
  SingularSolution(double t, double x);
  double t() const noexcept { return t_; }
  double x() const noexcept { return x_; }

 private:
  double t_;
  double x_;
};

}  // namespace liouville
