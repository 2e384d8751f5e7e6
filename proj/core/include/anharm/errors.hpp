#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace anharm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function or symbol produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point)
      : Error(what), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, int node) : Error(what), node_(node) {}

  int node() const noexcept { return node_; }

 private:
  int node_;
};

/// Iterative method hit its cap. Carries the last estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

class OutOfTrustError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// q + lambda_min < 1; reports the smallest admissible shift.
class ShiftTooSmallError : public Error {
 public:
  ShiftTooSmallError(const std::string& what, double required_q)
      : Error(what), required_q_(required_q) {}

  double required_q() const noexcept { return required_q_; }

 private:
  double required_q_;
};

class DomainTooSmallError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace anharm
