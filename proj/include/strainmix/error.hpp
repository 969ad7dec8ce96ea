#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strainmix {

enum class ErrorKind {
  PositivityViolation,
  UnknownStratum,
  UnknownOutcome,
  UnknownStrain,
  NonStochastic,
  EmptyCell,
  EmptyReport,
  Syntax,
  Schema,
  Validation,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Every engine failure is an Error carrying its kind; the message names the
/// offending stratum/version/outcome where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit status for an error: 1 for domain errors (positivity, empty
/// cells, unknown labels in a transport target), 2 for usage and input errors.
int exit_code(ErrorKind kind);

}  // namespace strainmix
