#ifndef FGEN_ERROR_HPP_INCLUDED
#define FGEN_ERROR_HPP_INCLUDED

#include <stdexcept>
#include <string>
#include <string_view>

namespace fgen {

enum class ErrorCode {
  ParseError,
  ValidationError,
  TypeMismatch,
  InvalidMatrix,
  InvalidHierarchy,
  MissingMatrix,
  NegativeValue,
  UnknownComponent,
  EmptyRanking,
  NoFeasibleCombination,
  AlreadyCommitted,
  NotEvaluated,
  InfeasibleSelection,
  ReplayMismatch,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidHierarchy: return "InvalidHierarchy";
    case ErrorCode::MissingMatrix: return "MissingMatrix";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::EmptyRanking: return "EmptyRanking";
    case ErrorCode::NoFeasibleCombination: return "NoFeasibleCombination";
    case ErrorCode::AlreadyCommitted: return "AlreadyCommitted";
    case ErrorCode::NotEvaluated: return "NotEvaluated";
    case ErrorCode::InfeasibleSelection: return "InfeasibleSelection";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
  }
  return "Unknown";
}

/// Base of every engine error. `detail` names the offending id/field when
/// there is one, so callers (CLI, HTTP) can surface it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

template <ErrorCode Code>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& message, std::string detail = {})
      : Error(Code, message, std::move(detail)) {}
};

using ParseError = CodedError<ErrorCode::ParseError>;
using ValidationError = CodedError<ErrorCode::ValidationError>;
using TypeMismatch = CodedError<ErrorCode::TypeMismatch>;
using InvalidMatrix = CodedError<ErrorCode::InvalidMatrix>;
using InvalidHierarchy = CodedError<ErrorCode::InvalidHierarchy>;
using MissingMatrix = CodedError<ErrorCode::MissingMatrix>;
using NegativeValue = CodedError<ErrorCode::NegativeValue>;
using UnknownComponent = CodedError<ErrorCode::UnknownComponent>;
using EmptyRanking = CodedError<ErrorCode::EmptyRanking>;
using NoFeasibleCombination = CodedError<ErrorCode::NoFeasibleCombination>;
using AlreadyCommitted = CodedError<ErrorCode::AlreadyCommitted>;
using NotEvaluated = CodedError<ErrorCode::NotEvaluated>;
using InfeasibleSelection = CodedError<ErrorCode::InfeasibleSelection>;
using ReplayMismatch = CodedError<ErrorCode::ReplayMismatch>;

}  // namespace fgen

#endif  // FGEN_ERROR_HPP_INCLUDED
