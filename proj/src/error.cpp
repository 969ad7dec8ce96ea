#include "strainmix/error.hpp"

namespace strainmix {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::UnknownStratum: return "UnknownStratum";
    case ErrorKind::UnknownOutcome: return "UnknownOutcome";
    case ErrorKind::UnknownStrain: return "UnknownStrain";
    case ErrorKind::NonStochastic: return "NonStochastic";
    case ErrorKind::EmptyCell: return "EmptyCellError";
    case ErrorKind::EmptyReport: return "EmptyReport";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Usage: return "UsageError";
  }
  return "Error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PositivityViolation:
    case ErrorKind::UnknownStratum:
    case ErrorKind::UnknownStrain:
    case ErrorKind::NonStochastic:
    case ErrorKind::EmptyCell:
    case ErrorKind::EmptyReport:
      return 1;
    case ErrorKind::UnknownOutcome:
    case ErrorKind::Syntax:
    case ErrorKind::Schema:
    case ErrorKind::Validation:
    case ErrorKind::Usage:
      return 2;
  }
  return 2;
}

}  // namespace strainmix
