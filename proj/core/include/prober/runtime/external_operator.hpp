// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "prober/operator.hpp"
#include "prober/record.hpp"

namespace prober::runtime {

inline constexpr std::chrono::milliseconds kDefaultExternalTimeout{60000};

struct ExternalSpec {
  std::string command;
  std::vector<std::string> args;  // placed before the --input flags
  std::chrono::milliseconds timeout = kDefaultExternalTimeout;
};

/// Runs `command [args...] --input <port0.jsonl> [--input <port1.jsonl> ...]`
/// and reads JSON Lines records from its stdout. Throws kOperatorFailure on a
/// spawn failure, nonzero exit, malformed output line, or timeout.
RecordSet external_operator_invoke(const ExternalSpec& spec, std::span<const RecordSet> inputs);

OperatorHandle make_external_operator(std::string name, std::size_t arity, ExternalSpec spec,
                                      SpecLevel spec_level = {}, PropertyClass properties = {});

}  // namespace prober::runtime
