// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prober {

enum class ErrorCode {
  kBudgetExhausted,
  kCancelled,
  kOperatorFailure,
  kNondeterministic,
  kNotProduced,
  kBoundViolated,
  kShapeViolation,
  kMissingWitness,
  kInexactProvenance,
  kUnsupportedCombination,
  kTooLarge,
  kCorruptTrace,
  kUnknownRun,
  kUnknownRecord,
  kUnknownNode,
  kInvalidPipeline,
  kInvalidArgument,
  kDivisionUndefined,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, HTTP service) can map it onto exit codes and status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for errors caused by the caller's request rather than by the engine.
bool is_user_error(ErrorCode code);

}  // namespace prober
