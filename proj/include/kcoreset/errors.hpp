#pragma once

#include <stdexcept>
#include <string>

namespace kcoreset {

/// Malformed or out-of-contract input: bad parameters, dimension mismatch,
/// unparsable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point set with fewer than two distinct locations where a positive
/// pairwise distance is required.
class DegenerateSetError : public InputError {
 public:
  using InputError::InputError;
};

/// An enumeration (universe, candidate center sets, flow weights) would exceed
/// its configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every grid level failed to produce a verified sparse-recovery answer.
class SketchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse error carrying the 1-based line number of the offending input line.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kcoreset
