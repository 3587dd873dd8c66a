#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clustercast {

/// One violated constraint, tagged with the offending field name.
struct FieldError {
  std::string field;
  std::string message;
};

/// Aggregated configuration failure. Carries every violation found, not just
/// the first one.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<FieldError> errors)
      : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}

  ValidationError(std::string field, std::string message)
      : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<FieldError>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += e.field + ": " + e.message;
    }
    return out;
  }

  std::vector<FieldError> errors_;
};

/// Root bracketing or quadrature could not produce a value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace clustercast
