#pragma once

#include <stdexcept>
#include <string>

namespace fsmx {

// Base class for every failure a caller can provoke with bad domain input
// (unknown symbols, malformed automata, out-of-range parameters). The CLI
// maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public DomainError {
 public:
  using DomainError::DomainError;
};

class ShapeMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class DiagnosticUnavailable : public DomainError {
 public:
  using DomainError::DomainError;
};

class GuardExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

// Raised by quantization extraction when the cell cap is hit.
class StateExplosion : public GuardExceeded {
 public:
  StateExplosion(const std::string& what, std::size_t partial_size)
      : GuardExceeded(what), partial_size_(partial_size) {}

  std::size_t partial_size() const noexcept { return partial_size_; }

 private:
  std::size_t partial_size_;
};

}  // namespace fsmx
