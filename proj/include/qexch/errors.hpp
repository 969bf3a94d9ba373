#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qexch {

// Raised when a sample point hits a pole or a singular matrix; callers resample.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivisionByZero : public PoleError {
 public:
  DivisionByZero() : PoleError("division by zero") {}
};

class SingularMatrix : public PoleError {
 public:
  explicit SingularMatrix(std::size_t stage)
      : PoleError("singular matrix: no pivot at elimination stage " + std::to_string(stage)),
        stage_(stage) {}
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

class LegError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShiftModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, inconsistent configuration, refused imports.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qexch
