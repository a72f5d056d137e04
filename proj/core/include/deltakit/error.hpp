#pragma once

#include <stdexcept>
#include <string>

namespace deltakit {

// Argument outside the mathematical domain of an operation (q < 1, z <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Argument outside a table or enumeration range (n > sieve limit, k > basis length).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A configured size or memory cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Least-squares or linear solve with a singular / rank-deficient design.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every Monte Carlo sample was rejected by the divisor cap.
class DegenerateEstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature that missed its error target; carries the best estimate reached.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_value, double best_error)
      : std::runtime_error(what), best_value_(best_value), best_error_(best_error) {}

  double best_value() const noexcept { return best_value_; }
  double best_error() const noexcept { return best_error_; }

 private:
  double best_value_;
  double best_error_;
};

// Malformed input file (bad magic, truncated header, unparsable CSV row).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deltakit
