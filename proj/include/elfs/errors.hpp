#pragma once

#include <stdexcept>
#include <string>

namespace elfs {

/// Input violates a documented precondition (bad graph, bad parameter).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical identity or certificate failed its tolerance check.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampler or truncated series ran out of its step / counter budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace elfs
