// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/error.hpp"

namespace prober {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kCancelled: return "Cancelled";
    case ErrorCode::kOperatorFailure: return "OperatorFailure";
    case ErrorCode::kNondeterministic: return "Nondeterministic";
    case ErrorCode::kNotProduced: return "NotProduced";
    case ErrorCode::kBoundViolated: return "BoundViolated";
    case ErrorCode::kShapeViolation: return "ShapeViolation";
    case ErrorCode::kMissingWitness: return "MissingWitness";
    case ErrorCode::kInexactProvenance: return "InexactProvenance";
    case ErrorCode::kUnsupportedCombination: return "UnsupportedCombination";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kCorruptTrace: return "CorruptTrace";
    case ErrorCode::kUnknownRun: return "UnknownRun";
    case ErrorCode::kUnknownRecord: return "UnknownRecord";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kInvalidPipeline: return "InvalidPipeline";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDivisionUndefined: return "DivisionUndefined";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

bool is_user_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownRun:
    case ErrorCode::kUnknownRecord:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kInvalidPipeline:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNotProduced:
      return true;
    default:
      return false;
  }
}

}  // namespace prober
