#pragma once

#include <stdexcept>
#include <string>

namespace tanks {

/// A value lies outside the domain on which a transform or law is defined
/// (negative square-root argument, vanishing denominator, non-finite level).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested level cannot be held in steady state by the pump.
class InfeasibleSetpoint : public std::invalid_argument {
 public:
  InfeasibleSetpoint(const std::string& what, double max_h1ref)
      : std::invalid_argument(what), max_h1ref_(max_h1ref) {}

  /// Largest h1 reference (m) the plant can hold.
  double max_h1ref() const noexcept { return max_h1ref_; }

 private:
  double max_h1ref_;
};

/// Scenario or CSV text that does not follow the file format.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace tanks
