#pragma once

#include <stdexcept>
#include <string>

namespace crf {

/// Malformed or inconsistent user input (non-Hermitian data, bad flags, ...).
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical precondition failed: zero constant term under log, derivative
/// of a jet with no trusted degrees left, non-invertible leading term.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crf
