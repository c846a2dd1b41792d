#pragma once

#include <stdexcept>
#include <string>

namespace decaywatch {

// Raised when an operation requires a non-terminal observation cycle.
class TerminalStateError : public std::logic_error {
 public:
  explicit TerminalStateError(const std::string& what) : std::logic_error(what) {}
};

// Raised when an integrator or closed-form path produces values that violate
// probability bounds by more than the tolerated roundoff.
class NumericalIntegrityError : public std::runtime_error {
 public:
  explicit NumericalIntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by statistical comparisons that cannot form a test statistic
// (fewer than two usable bins).
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by finite uniform sources when a trajectory asks for more draws
// than the source holds.
class StreamExhaustedError : public std::runtime_error {
 public:
  explicit StreamExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace decaywatch
