#pragma once

#include <stdexcept>
#include <string>

namespace dcs {

// Base class for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Inconsistent or empty dimensions.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

// A documented precondition does not hold (e.g. symmetry, parameter range).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error("contract", what) {}
};

// An exhaustive enumeration would exceed its combination budget.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error("budget", what) {}
};

// A closed-form bound does not apply (delta_2s >= sqrt(2) - 1, degenerate C).
class BoundInapplicableError : public Error {
 public:
  explicit BoundInapplicableError(const std::string& what)
      : Error("bound_inapplicable", what) {}
};

// A resolvent or linear system is singular.
class SingularError : public Error {
 public:
  explicit SingularError(const std::string& what) : Error("singular", what) {}
};

// Malformed file or JSON document.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

// A file cannot be opened, created or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace dcs
